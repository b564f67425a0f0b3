"""Dense state-vector formalism: states, unitaries, measurements, QFT.

Basis convention: an ``n``-qubit basis label is an integer in ``[0, 2**n)``
and qubit 0 is the most significant bit. In a tensor product ``a (x) b`` the
first factor occupies the high-order bits, so ``|i>|j>`` has label
``i * dim(b) + j``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DegenerateMeasurementError, InvalidInputError, ZeroNormError
from .spectral import as_sequence, is_power_of_two

__all__ = [
    "NORM_TOL",
    "PROBABILITY_FLOOR",
    "QuantumState",
    "LinearMap",
    "UnitaryMap",
    "MeasurementSet",
    "Gate",
    "QftCircuit",
    "from_sequence",
    "basis_state",
    "uniform_state",
    "random_state",
    "random_unitary",
    "tensor",
    "apply",
    "outcome_probabilities",
    "measure",
    "sample_outcomes",
    "computational_measurement",
    "qft_dense",
    "iqft_dense",
    "qft_circuit",
    "partial_trace_first",
    "state_to_json",
    "state_from_json",
    "read_state",
    "write_state",
]

NORM_TOL = 1e-10
# outcomes below this probability are never sampled; avoids blow-up in M|psi>/sqrt(p)
PROBABILITY_FLOOR = 1e-14


def _num_qubits(dim: int) -> int:
    if not is_power_of_two(dim) or dim < 2:
        raise InvalidInputError(f"dimension {dim} is not 2**n with n >= 1")
    return dim.bit_length() - 1


@dataclass(frozen=True)
class QuantumState:
    """Unit-norm amplitude vector over ``2**num_qubits`` basis labels."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = as_sequence(self.amplitudes)
        if amps.ndim != 1:
            raise InvalidInputError("amplitudes must be a 1-D vector")
        _num_qubits(amps.shape[0])
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidInputError(f"state is not normalized (norm={norm!r})")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_qubits(self) -> int:
        return self.dim.bit_length() - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)

    def allclose(self, other: QuantumState, atol: float = 1e-10) -> bool:
        return self.dim == other.dim and np.allclose(
            self.amplitudes, other.amplitudes, rtol=0.0, atol=atol)


@dataclass(frozen=True)
class LinearMap:
    """Dense complex matrix acting on column vectors."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or 0 in m.shape:
            raise InvalidInputError("a linear map needs a non-empty 2-D matrix")
        if not np.all(np.isfinite(m)):
            raise InvalidInputError("linear map has non-finite entries")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    def __matmul__(self, other):
        if isinstance(other, LinearMap):
            return LinearMap(self.matrix @ other.matrix)
        return self.matrix @ np.asarray(other)

    def dagger(self) -> LinearMap:
        return LinearMap(self.matrix.conj().T)


@dataclass(frozen=True)
class UnitaryMap(LinearMap):
    """Square linear map with ``U^dag U = I = U U^dag``."""

    def __post_init__(self):
        super().__post_init__()
        m = self.matrix
        if m.shape[0] != m.shape[1]:
            raise InvalidInputError(f"unitary must be square, got {m.shape}")
        eye = np.eye(m.shape[0])
        if (np.abs(m.conj().T @ m - eye).max() > NORM_TOL
                or np.abs(m @ m.conj().T - eye).max() > NORM_TOL):
            raise InvalidInputError("matrix is not unitary")

    def dagger(self) -> UnitaryMap:
        return UnitaryMap(self.matrix.conj().T)


@dataclass(frozen=True)
class MeasurementSet:
    """Measurement operators ``{M_m}`` with ``sum_m M_m^dag M_m = I``.

    Each operator is either a square matrix or, for operators that are
    diagonal in the computational basis, a 1-D array holding the diagonal.
    The diagonal form keeps projective measurements on large registers
    (``2**20`` labels) cheap. Completeness is checked at construction.
    """

    operators: tuple

    def __post_init__(self):
        if len(self.operators) == 0:
            raise InvalidInputError("a measurement set needs at least one operator")
        ops = []
        dim = None
        for op in self.operators:
            if isinstance(op, LinearMap):
                op = op.matrix
            arr = np.array(op, dtype=np.complex128)
            if arr.ndim == 2 and arr.shape[0] != arr.shape[1]:
                raise InvalidInputError("measurement operators must be square")
            if arr.ndim not in (1, 2):
                raise InvalidInputError("operator must be a matrix or a diagonal")
            if dim is None:
                dim = arr.shape[0]
            elif arr.shape[0] != dim:
                raise InvalidInputError("measurement operators differ in dimension")
            arr.flags.writeable = False
            ops.append(arr)
        object.__setattr__(self, "operators", tuple(ops))
        self._check_completeness()

    def _check_completeness(self):
        if all(op.ndim == 1 for op in self.operators):
            total = sum(np.abs(op) ** 2 for op in self.operators)
            dev = np.abs(total - 1.0).max()
        else:
            total = sum(self._as_matrix(op).conj().T @ self._as_matrix(op)
                        for op in self.operators)
            dev = np.abs(total - np.eye(self.dim)).max()
        if dev > NORM_TOL:
            raise InvalidInputError(
                f"measurement operators are not complete (deviation {dev:.3g})")

    @staticmethod
    def _as_matrix(op: np.ndarray) -> np.ndarray:
        return np.diag(op) if op.ndim == 1 else op

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self) -> int:
        return len(self.operators)

    def act(self, m: int, vec: np.ndarray) -> np.ndarray:
        """Unnormalized ``M_m |vec>``."""
        op = self.operators[m]
        return op * vec if op.ndim == 1 else op @ vec


@dataclass(frozen=True)
class Gate:
    """Elementary gate: ``H`` on one qubit, ``CP`` (controlled phase) or ``SWAP`` on two."""

    name: str
    qubits: tuple[int, ...]
    angle: float = 0.0


_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)


def _apply_gate(tensor: np.ndarray, gate: Gate) -> np.ndarray:
    # tensor has shape (2,)*n + (batch,) with qubit q on axis q
    if gate.name == "H":
        (q,) = gate.qubits
        out = np.tensordot(_H, tensor, axes=([1], [q]))
        return np.moveaxis(out, 0, q)
    if gate.name == "CP":
        c, t = gate.qubits
        out = tensor.copy()
        idx = [slice(None)] * tensor.ndim
        idx[c] = 1
        idx[t] = 1
        out[tuple(idx)] *= np.exp(1j * gate.angle)
        return out
    if gate.name == "SWAP":
        a, b = gate.qubits
        return np.swapaxes(tensor, a, b).copy()
    raise InvalidInputError(f"unknown gate {gate.name!r}")


@dataclass(frozen=True)
class QftCircuit:
    num_qubits: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    @property
    def gate_count(self) -> int:
        return len(self.gates)

    def count(self, name: str) -> int:
        return sum(g.name == name for g in self.gates)

    def apply(self, vec) -> np.ndarray:
        """Run the gate list on a vector (or on the columns of a matrix)."""
        arr = np.asarray(vec, dtype=np.complex128)
        n = self.num_qubits
        cols = arr.reshape(2 ** n, -1)
        t = cols.reshape((2,) * n + (cols.shape[1],))
        for g in self.gates:
            t = _apply_gate(t, g)
        return t.reshape(arr.shape)

    def matrix(self) -> np.ndarray:
        return self.apply(np.eye(2 ** self.num_qubits, dtype=np.complex128))


# -- constructors ----------------------------------------------------------

def from_sequence(s) -> QuantumState:
    """Encode a nonzero power-of-two-length sequence as a normalized state."""
    a = as_sequence(s)
    if a.ndim != 1:
        raise InvalidInputError("expected a 1-D sequence")
    _num_qubits(a.shape[0])
    norm = np.linalg.norm(a)
    if norm == 0.0:
        raise ZeroNormError("cannot encode an all-zero sequence as a state")
    return QuantumState(a / norm)


def basis_state(index: int, num_qubits: int) -> QuantumState:
    amps = np.zeros(2 ** num_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return QuantumState(amps)


def uniform_state(num_qubits: int) -> QuantumState:
    dim = 2 ** num_qubits
    return QuantumState(np.full(dim, 1.0 / math.sqrt(dim), dtype=np.complex128))


def random_state(num_qubits: int, rng: np.random.Generator) -> QuantumState:
    """Haar-random pure state: normalized i.i.d. standard complex Gaussians."""
    dim = 2 ** num_qubits
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return QuantumState(z / np.linalg.norm(z))


def random_unitary(dim: int, rng: np.random.Generator) -> UnitaryMap:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    z = (rng.standard_normal((dim, dim))
         + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return UnitaryMap(q * (d / np.abs(d)))


# -- operations ------------------------------------------------------------

def tensor(*states: QuantumState) -> QuantumState:
    if not states:
        raise InvalidInputError("tensor needs at least one state")
    amps = states[0].amplitudes
    for s in states[1:]:
        amps = np.kron(amps, s.amplitudes)
    return QuantumState(amps)


def apply(u: LinearMap, state: QuantumState) -> QuantumState:
    """Apply a unitary to a state."""
    if u.cols != state.dim or u.rows != state.dim:
        raise InvalidInputError(
            f"operator of shape {u.matrix.shape} cannot act on dimension {state.dim}")
    return QuantumState(u.matrix @ state.amplitudes)


def _check_dims(state: QuantumState, ms: MeasurementSet):
    if ms.dim != state.dim:
        raise InvalidInputError(
            f"measurement dimension {ms.dim} does not match state dimension {state.dim}")


def outcome_probabilities(state: QuantumState, ms: MeasurementSet) -> np.ndarray:
    """Born-rule probabilities ``p(m) = <psi| M_m^dag M_m |psi>``."""
    _check_dims(state, ms)
    psi = state.amplitudes
    p = np.array([np.vdot(v, v).real for v in (ms.act(m, psi) for m in range(len(ms)))])
    return np.clip(p, 0.0, 1.0)


def _sampling_weights(p: np.ndarray) -> np.ndarray:
    w = np.where(p < PROBABILITY_FLOOR, 0.0, p)
    total = w.sum()
    if total <= 0.0:
        raise DegenerateMeasurementError("no outcome has non-negligible probability")
    return np.cumsum(w / total)


def sample_outcomes(state: QuantumState, ms: MeasurementSet,
                    rng: np.random.Generator, shots: int) -> np.ndarray:
    """Draw ``shots`` independent outcome indices without collapsing.

    Consumes the generator exactly as ``shots`` successive :func:`measure`
    calls on fresh copies of ``state`` would.
    """
    cdf = _sampling_weights(outcome_probabilities(state, ms))
    u = rng.random(shots)
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)


def measure(state: QuantumState, ms: MeasurementSet,
            rng: np.random.Generator) -> tuple[int, QuantumState]:
    """Sample an outcome and collapse the state to ``M_m|psi>/sqrt(p(m))``."""
    p = outcome_probabilities(state, ms)
    cdf = _sampling_weights(p)
    m = int(min(np.searchsorted(cdf, rng.random(), side="right"), len(cdf) - 1))
    post = ms.act(m, state.amplitudes)
    # renormalize by the realized norm so rounding never breaks the state invariant
    return m, QuantumState(post / np.linalg.norm(post))


def computational_measurement(num_qubits: int) -> MeasurementSet:
    """Projectors ``|i><i|`` for every basis label, stored as diagonals."""
    return MeasurementSet(tuple(np.eye(2 ** num_qubits)))


def qft_dense(num_qubits: int) -> UnitaryMap:
    """QFT matrix, entry ``(k, j) = exp(+2 pi i j k / N) / sqrt(N)``."""
    if num_qubits < 1:
        raise InvalidInputError("num_qubits must be >= 1")
    n = 2 ** num_qubits
    k = np.arange(n)
    roots = np.exp(2j * np.pi * k / n)
    return UnitaryMap(roots[np.outer(k, k) % n] / math.sqrt(n))


def iqft_dense(num_qubits: int) -> UnitaryMap:
    return qft_dense(num_qubits).dagger()


def qft_circuit(num_qubits: int) -> QftCircuit:
    """Hadamard / controlled-phase ladder followed by a qubit-order reversal.

    Uses ``n(n+1)/2`` H and CP gates plus ``n // 2`` swaps.
    """
    if num_qubits < 1:
        raise InvalidInputError("num_qubits must be >= 1")
    gates = []
    for target in range(num_qubits):
        gates.append(Gate("H", (target,)))
        for control in range(target + 1, num_qubits):
            k = control - target + 1
            gates.append(Gate("CP", (control, target), 2 * math.pi / 2 ** k))
    for q in range(num_qubits // 2):
        gates.append(Gate("SWAP", (q, num_qubits - 1 - q)))
    return QftCircuit(num_qubits, tuple(gates))


def partial_trace_first(vec, first_dim: int) -> np.ndarray:
    """Reduced density matrix of the leading ``first_dim``-dimensional factor.

    ``vec`` need not be normalized; the result has trace ``||vec||**2``.
    """
    v = np.asarray(vec, dtype=np.complex128)
    if v.shape[-1] % first_dim:
        raise InvalidInputError("first_dim does not divide the vector length")
    phi = v.reshape(*v.shape[:-1], first_dim, v.shape[-1] // first_dim)
    return phi @ np.swapaxes(phi, -1, -2).conj()


# -- file format: {"num_qubits": n, "amplitudes": [[re, im], ...]} ----------

def state_to_json(state: QuantumState) -> str:
    pairs = ", ".join(f"[{z.real:.17g}, {z.imag:.17g}]" for z in state.amplitudes)
    return f'{{"num_qubits": {state.num_qubits}, "amplitudes": [{pairs}]}}'


def state_from_json(text: str) -> QuantumState:
    def reject(token):
        raise InvalidInputError(f"non-finite number {token!r} in state file")

    try:
        raw = json.loads(text, parse_constant=reject)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"malformed state JSON: {exc}") from exc
    if not isinstance(raw, dict) or set(raw) != {"num_qubits", "amplitudes"}:
        raise InvalidInputError("state file needs exactly num_qubits and amplitudes")
    n = raw["num_qubits"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidInputError(f"bad num_qubits {n!r}")
    pairs = raw["amplitudes"]
    if not isinstance(pairs, list) or len(pairs) != 2 ** n:
        raise InvalidInputError(f"expected {2 ** n} amplitude pairs")
    amps = []
    for p in pairs:
        if (not isinstance(p, list) or len(p) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in p)):
            raise InvalidInputError(f"expected [re, im] pair, got {p!r}")
        amps.append(complex(p[0], p[1]))
    return QuantumState(np.array(amps))


def read_state(path) -> QuantumState:
    return state_from_json(Path(path).read_text())


def write_state(path, state: QuantumState) -> None:
    Path(path).write_text(state_to_json(state) + "\n")
