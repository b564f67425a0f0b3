"""Componentwise product by post-selecting on the diagonal subspace.

Measuring ``a (x) b`` with the projector pair ``{P, I - P}``, where ``P``
projects onto ``span{|ii>}``, leaves ``lambda * sum_i a_i b_i |ii>`` on
outcome 0. The price is the success probability ``sum_i |a_i b_i|^2``,
which for the uniform pair is ``1/N`` and so vanishes as registers grow.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import InvalidInputError
from .qsim import (
    MeasurementSet,
    QuantumState,
    measure,
    random_state,
    sample_outcomes,
    tensor,
    uniform_state,
)

__all__ = [
    "PostselectOutcome",
    "ScanRow",
    "FAMILIES",
    "diagonal_labels",
    "diagonal_measurement",
    "success_probability",
    "attempt",
    "relabel_diagonal",
    "embed_diagonal",
    "scan",
    "within_band",
    "scan_to_csv",
]

FAMILIES = ("uniform", "seeded-random")


@dataclass(frozen=True)
class PostselectOutcome:
    success: bool
    post_state: Optional[QuantumState]
    probability: float


@dataclass(frozen=True)
class ScanRow:
    n: int
    N: int
    analytic_p: float
    empirical_p: float
    trials: int
    seed: int

    @property
    def sigma(self) -> float:
        return math.sqrt(self.analytic_p * (1.0 - self.analytic_p) / self.trials)


def diagonal_labels(num_qubits: int) -> np.ndarray:
    """Joint labels of ``|ii>`` on two ``num_qubits``-qubit registers."""
    dim = 2 ** num_qubits
    return np.arange(dim) * (dim + 1)


def diagonal_measurement(num_qubits: int) -> MeasurementSet:
    """Projectors onto ``span{|ii>}`` (outcome 0) and its complement (outcome 1).

    Both are diagonal in the computational basis and stored as 0/1 diagonals,
    so completeness holds exactly.
    """
    if num_qubits < 1:
        raise InvalidInputError("num_qubits must be >= 1")
    keep = np.zeros(4 ** num_qubits)
    keep[diagonal_labels(num_qubits)] = 1.0
    return MeasurementSet((keep, 1.0 - keep))


def success_probability(a: QuantumState, b: QuantumState) -> float:
    if a.dim != b.dim:
        raise InvalidInputError("registers must have the same number of qubits")
    return float(np.sum(np.abs(a.amplitudes * b.amplitudes) ** 2))


def attempt(a: QuantumState, b: QuantumState,
            rng: np.random.Generator) -> PostselectOutcome:
    """One post-selection attempt on ``a (x) b``.

    A zero success probability short-circuits to failure without consuming
    the generator.
    """
    p = success_probability(a, b)
    if p == 0.0:
        return PostselectOutcome(False, None, 0.0)
    outcome, post = measure(tensor(a, b), diagonal_measurement(a.num_qubits), rng)
    if outcome == 0:
        return PostselectOutcome(True, post, p)
    return PostselectOutcome(False, None, p)


def relabel_diagonal(state: QuantumState) -> QuantumState:
    """Map a state supported on ``|ii>`` labels to the single-register state ``sum c_i |i>``."""
    n = state.num_qubits
    if n % 2:
        raise InvalidInputError("expected a two-register state")
    labels = diagonal_labels(n // 2)
    amps = state.amplitudes
    off = np.delete(amps, labels)
    if off.size and np.abs(off).max() > 1e-12:
        raise InvalidInputError("state has weight off the diagonal labels")
    return QuantumState(amps[labels])


def embed_diagonal(state: QuantumState) -> QuantumState:
    """Inverse of :func:`relabel_diagonal`: ``sum c_i |i>`` to ``sum c_i |ii>``."""
    out = np.zeros(state.dim ** 2, dtype=np.complex128)
    out[diagonal_labels(state.num_qubits)] = state.amplitudes
    return QuantumState(out)


def _pair(family: str, n: int, rng: np.random.Generator):
    if family == "uniform":
        u = uniform_state(n)
        return u, u
    if family == "seeded-random":
        return random_state(n, rng), random_state(n, rng)
    raise InvalidInputError(f"unknown family {family!r}; expected one of {FAMILIES}")


def scan(n_range: Iterable[int], family: str = "uniform", trials: int = 10_000,
         seed: int = 0) -> list[ScanRow]:
    """Analytic and empirical success probability for each register size.

    For the uniform family ``analytic_p`` is the closed form ``1/N``.
    Every ``n`` gets its own generator from ``SeedSequence([seed, n])``; the
    seeded-random family draws its pair from it before the trials. Trials
    sample outcomes of the diagonal measurement on the same input, which is
    equivalent to ``trials`` independent :func:`attempt` calls.
    """
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    rows = []
    for n in sorted(set(n_range)):
        if n < 1:
            raise InvalidInputError("register sizes must be >= 1")
        rng = np.random.default_rng(np.random.SeedSequence([seed, n]))
        a, b = _pair(family, n, rng)
        # closed form for the uniform pair; the amplitude sum is only ulp-accurate
        analytic = 1.0 / 2 ** n if family == "uniform" else success_probability(a, b)
        if analytic > 0.0:
            joint = tensor(a, b)
            outcomes = sample_outcomes(joint, diagonal_measurement(n), rng, trials)
            empirical = float(np.count_nonzero(outcomes == 0)) / trials
        else:
            empirical = 0.0
        rows.append(ScanRow(n=n, N=2 ** n, analytic_p=analytic,
                            empirical_p=empirical, trials=trials, seed=seed))
    return rows


def within_band(row: ScanRow, sigmas: float = 3.0) -> bool:
    return abs(row.empirical_p - row.analytic_p) <= sigmas * row.sigma


def scan_to_csv(rows: Iterable[ScanRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "N", "analytic_p", "empirical_p", "trials", "seed"])
    for r in rows:
        w.writerow([r.n, r.N, repr(r.analytic_p), repr(r.empirical_p), r.trials, r.seed])
    return buf.getvalue()
