import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qconv import qsim, spectral
from qconv.errors import DegenerateMeasurementError, InvalidInputError, ZeroNormError
from qconv.qsim import MeasurementSet, QuantumState


def test_from_sequence_normalizes():
    s = qsim.from_sequence([3, 4])
    np.testing.assert_allclose(s.amplitudes, [0.6, 0.8])
    assert s.num_qubits == 1


def test_from_sequence_uniform():
    s = qsim.from_sequence([1, 1, 1, 1])
    assert s.allclose(qsim.uniform_state(2))


def test_from_sequence_errors():
    with pytest.raises(ZeroNormError):
        qsim.from_sequence([0, 0])
    with pytest.raises(InvalidInputError):
        qsim.from_sequence([1, 2, 3])


def test_state_rejects_unnormalized():
    with pytest.raises(InvalidInputError):
        QuantumState(np.array([1.0, 1.0]))


def test_state_is_immutable():
    s = qsim.basis_state(0, 1)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0.0


class TestTensor:
    def test_basis_labels(self):
        out = qsim.tensor(qsim.basis_state(0, 1), qsim.basis_state(1, 1))
        np.testing.assert_array_equal(out.amplitudes, [0, 1, 0, 0])

    def test_first_factor_is_high_order(self):
        out = qsim.tensor(qsim.basis_state(2, 2), qsim.basis_state(1, 1))
        assert np.argmax(np.abs(out.amplitudes)) == 2 * 2 + 1

    def test_uniform(self):
        u = qsim.uniform_state(1)
        assert qsim.tensor(u, u).allclose(qsim.uniform_state(2))

    def test_norm_and_associativity(self, rng):
        a, b, c = (qsim.random_state(k, rng) for k in (1, 2, 3))
        ab_c = qsim.tensor(qsim.tensor(a, b), c)
        a_bc = qsim.tensor(a, qsim.tensor(b, c))
        assert abs(np.linalg.norm(ab_c.amplitudes) - 1) < 1e-12
        np.testing.assert_allclose(ab_c.amplitudes, a_bc.amplitudes, atol=1e-15)


class TestApply:
    def test_identity(self, rng):
        s = qsim.random_state(3, rng)
        assert qsim.apply(qsim.UnitaryMap(np.eye(8)), s).allclose(s, atol=0)

    def test_hadamard(self):
        h = qsim.UnitaryMap(np.array([[1, 1], [1, -1]]) / math.sqrt(2))
        out = qsim.apply(h, qsim.basis_state(0, 1))
        np.testing.assert_allclose(out.amplitudes, [1 / math.sqrt(2)] * 2)

    def test_random_unitary_preserves_norm(self, rng):
        for _ in range(20):
            u = qsim.random_unitary(16, rng)
            out = qsim.apply(u, qsim.random_state(4, rng))
            assert abs(np.linalg.norm(out.amplitudes) - 1) < 1e-10

    def test_dimension_mismatch(self, rng):
        with pytest.raises(InvalidInputError):
            qsim.apply(qsim.UnitaryMap(np.eye(4)), qsim.random_state(1, rng))

    def test_unitary_validation(self):
        with pytest.raises(InvalidInputError):
            qsim.UnitaryMap(np.array([[1, 1], [0, 1]]))
        with pytest.raises(InvalidInputError):
            qsim.UnitaryMap(np.ones((2, 3)))


class TestMeasurementSet:
    def test_completeness_checked(self):
        with pytest.raises(InvalidInputError):
            MeasurementSet((np.diag([1.0, 0.0]),))
        with pytest.raises(InvalidInputError):
            MeasurementSet(())

    def test_mixed_dims_rejected(self):
        with pytest.raises(InvalidInputError):
            MeasurementSet((np.eye(2), np.zeros((4, 4))))

    def test_non_projective_set(self):
        # two-outcome POVM-style set: M0 = sqrt(p) I, M1 = sqrt(1-p) X
        p = 0.3
        x = np.array([[0, 1], [1, 0]])
        ms = MeasurementSet((math.sqrt(p) * np.eye(2), math.sqrt(1 - p) * x))
        s = qsim.from_sequence([3, 4])
        np.testing.assert_allclose(qsim.outcome_probabilities(s, ms), [p, 1 - p])


class TestProbabilities:
    def test_born_rule_on_basis(self):
        s = qsim.from_sequence([3, 4])
        probs = qsim.outcome_probabilities(s, qsim.computational_measurement(1))
        np.testing.assert_allclose(probs, [9 / 25, 16 / 25])

    def test_identity_singleton(self, rng):
        s = qsim.random_state(2, rng)
        np.testing.assert_allclose(
            qsim.outcome_probabilities(s, MeasurementSet((np.eye(4),))), [1.0])

    def test_diagonal_split_on_uniform_pair(self):
        u = qsim.uniform_state(1)
        keep = np.array([1.0, 0, 0, 1.0])
        ms = MeasurementSet((keep, 1 - keep))
        probs = qsim.outcome_probabilities(qsim.tensor(u, u), ms)
        # direct sum: |1/2|^2 on labels 00 and 11
        np.testing.assert_allclose(probs, [0.5, 0.5])

    def test_diagonal_split_two_qubit_registers(self):
        u = qsim.uniform_state(2)
        keep = np.zeros(16)
        keep[[0, 5, 10, 15]] = 1.0
        probs = qsim.outcome_probabilities(qsim.tensor(u, u), MeasurementSet((keep, 1 - keep)))
        np.testing.assert_allclose(probs, [1 / 4, 3 / 4])

    def test_dense_and_diagonal_forms_agree(self, rng):
        s = qsim.random_state(3, rng)
        diag = qsim.computational_measurement(3)
        dense = MeasurementSet(tuple(np.diag(d) for d in diag.operators))
        np.testing.assert_allclose(qsim.outcome_probabilities(s, diag),
                                   qsim.outcome_probabilities(s, dense), atol=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
    def test_sum_to_one_for_random_unitary_basis(self, n, seed):
        rng = np.random.default_rng(seed)
        u = qsim.random_unitary(2 ** n, rng).matrix
        # projectors onto the columns of a random unitary
        ms = MeasurementSet(tuple(np.outer(u[:, k], u[:, k].conj()) for k in range(2 ** n)))
        probs = qsim.outcome_probabilities(qsim.random_state(n, rng), ms)
        assert abs(probs.sum() - 1) < 1e-10
        assert np.all((probs >= 0) & (probs <= 1))


class TestMeasure:
    def test_certain_outcome(self, rng):
        m, post = qsim.measure(qsim.basis_state(0, 1), qsim.computational_measurement(1), rng)
        assert m == 0
        assert post.allclose(qsim.basis_state(0, 1))

    def test_collapse_formula(self, rng):
        s = qsim.from_sequence([1, 1, 1, 1])
        keep = np.array([1.0, 1.0, 0, 0])
        m, post = qsim.measure(s, MeasurementSet((keep, 1 - keep)), rng)
        expected = [1, 1, 0, 0] if m == 0 else [0, 0, 1, 1]
        np.testing.assert_allclose(post.amplitudes, np.array(expected) / math.sqrt(2))

    def test_post_state_normalized(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 4))
            u = qsim.random_unitary(2 ** n, rng).matrix
            ms = MeasurementSet(tuple(np.outer(u[:, k], u[:, k].conj()) for k in range(2 ** n)))
            _, post = qsim.measure(qsim.random_state(n, rng), ms, rng)
            assert abs(np.linalg.norm(post.amplitudes) - 1) < 1e-10

    def test_empirical_frequencies(self):
        rng = np.random.default_rng(5)
        s = qsim.random_state(2, rng)
        ms = qsim.computational_measurement(2)
        probs = qsim.outcome_probabilities(s, ms)
        trials = 10_000
        counts = np.bincount([qsim.measure(s, ms, rng)[0] for _ in range(trials)], minlength=4)
        sigma = np.sqrt(probs * (1 - probs) / trials)
        assert np.all(np.abs(counts / trials - probs) <= 3 * sigma)

    def test_seed_reproducibility(self):
        s = qsim.uniform_state(3)
        ms = qsim.computational_measurement(3)

        def transcript(seed):
            rng = np.random.default_rng(seed)
            return [qsim.measure(s, ms, rng)[0] for _ in range(200)]

        assert transcript(11) == transcript(11)
        assert transcript(11) != transcript(12)

    def test_sample_outcomes_matches_repeated_measure(self):
        s = qsim.random_state(2, np.random.default_rng(1))
        ms = qsim.computational_measurement(2)
        r1, r2 = np.random.default_rng(9), np.random.default_rng(9)
        many = qsim.sample_outcomes(s, ms, r1, 300)
        single = [qsim.measure(s, ms, r2)[0] for _ in range(300)]
        np.testing.assert_array_equal(many, single)

    def test_tiny_outcomes_never_sampled(self, rng):
        eps = 1e-8  # probability 1e-16, below the floor
        s = QuantumState(np.array([math.sqrt(1 - eps ** 2), eps]))
        outcomes = qsim.sample_outcomes(s, qsim.computational_measurement(1), rng, 1000)
        assert not np.any(outcomes == 1)

    def test_degenerate(self, rng):
        # completeness forces some outcome to carry weight, so build the
        # degenerate case by zeroing the only supported outcome's probability
        s = qsim.basis_state(1, 1)
        ms = MeasurementSet((np.array([1.0, 0.0]), np.array([0.0, 1.0])))
        object.__setattr__(ms, "operators", (ms.operators[0], np.zeros(2)))
        with pytest.raises(DegenerateMeasurementError):
            qsim.measure(s, ms, rng)

    def test_dimension_mismatch(self, rng):
        with pytest.raises(InvalidInputError):
            qsim.measure(qsim.basis_state(0, 2), qsim.computational_measurement(1), rng)


class TestQft:
    def test_one_qubit(self):
        q = qsim.qft_dense(1)
        np.testing.assert_allclose(qsim.apply(q, qsim.basis_state(0, 1)).amplitudes,
                                   np.array([1, 1]) / math.sqrt(2), atol=1e-15)
        np.testing.assert_allclose(qsim.apply(q, qsim.basis_state(1, 1)).amplitudes,
                                   np.array([1, -1]) / math.sqrt(2), atol=1e-15)

    def test_entry_formula(self):
        q = qsim.qft_dense(3).matrix
        k, j = 5, 3
        assert q[k, j] == pytest.approx(np.exp(2j * np.pi * j * k / 8) / math.sqrt(8))

    @pytest.mark.parametrize("n", range(1, 9))
    def test_inverse_pair(self, n):
        prod = qsim.qft_dense(n).matrix @ qsim.iqft_dense(n).matrix
        assert np.abs(prod - np.eye(2 ** n)).max() < 1e-10

    @pytest.mark.parametrize("n", range(1, 9))
    def test_amplitudes_match_dft(self, rng, n):
        s = qsim.random_state(n, rng)
        out = qsim.apply(qsim.qft_dense(n), s).amplitudes
        assert np.abs(out - spectral.dft(s.amplitudes)).max() < 1e-10
        back = qsim.apply(qsim.iqft_dense(n), s).amplitudes
        assert np.abs(back - spectral.idft(s.amplitudes)).max() < 1e-10

    def test_circuit_single_qubit(self):
        c = qsim.qft_circuit(1)
        assert [g.name for g in c.gates] == ["H"]

    def test_circuit_three_qubits(self):
        c = qsim.qft_circuit(3)
        assert c.count("H") + c.count("CP") == 6
        assert c.count("SWAP") == 1
        assert np.abs(c.matrix() - qsim.qft_dense(3).matrix).max() < 1e-9

    @pytest.mark.parametrize("n", range(1, 9))
    def test_circuit_matches_dense(self, n):
        c = qsim.qft_circuit(n)
        assert c.gate_count == n * (n + 1) // 2 + n // 2
        assert np.abs(c.matrix() - qsim.qft_dense(n).matrix).max() < 1e-9

    def test_gate_count_n8(self):
        assert qsim.qft_circuit(8).gate_count == 40

    def test_circuit_on_state_vector(self, rng):
        s = qsim.random_state(4, rng)
        np.testing.assert_allclose(qsim.qft_circuit(4).apply(s.amplitudes),
                                   spectral.fft(s.amplitudes), atol=1e-12)


def test_partial_trace_of_product(rng):
    a, b = qsim.random_state(1, rng), qsim.random_state(2, rng)
    rho = qsim.partial_trace_first(qsim.tensor(a, b).amplitudes, 2)
    np.testing.assert_allclose(rho, np.outer(a.amplitudes, a.amplitudes.conj()), atol=1e-14)


class TestStateFiles:
    def test_round_trip(self, tmp_path, rng):
        s = qsim.random_state(3, rng)
        path = tmp_path / "state.json"
        qsim.write_state(path, s)
        loaded = qsim.read_state(path)
        np.testing.assert_array_equal(loaded.amplitudes, s.amplitudes)

    @pytest.mark.parametrize("text", [
        '{"num_qubits": 1, "amplitudes": [[1, 0], [1, 0]]}',
        '{"num_qubits": 2, "amplitudes": [[1, 0], [0, 0]]}',
        '{"num_qubits": 1, "amplitudes": [[NaN, 0], [0, 0]]}',
        '{"num_qubits": 0, "amplitudes": [[1, 0]]}',
        '{"amplitudes": [[1, 0], [0, 0]]}',
        '[1, 0]',
    ])
    def test_loader_rejects(self, text):
        with pytest.raises(InvalidInputError):
            qsim.state_from_json(text)
