"""Impossibility harness for the quantum componentwise product.

A candidate process is one fixed linear map acting on two ``N``-dimensional
input registers together with a fixed ``M``-dimensional ancilla. The map is
asked to turn ``a (x) b (x) c`` into ``(lambda * a*b) (x) d`` for arbitrary
inputs, where ``a*b`` is the componentwise product, ``lambda`` normalizes it,
and ``d`` is any unit vector. Sequences of unitaries and measurements with a
fixed ancilla compose into exactly this form, so the class covers every
unconditioned physical process.

Three routes are provided:

* :func:`paper_contradiction_check` evaluates the scalar normalization
  identity the one-parameter epsilon family forces on such a map.
* :func:`residual` and :func:`search_best_candidate` measure how far any
  concrete linear map is from the required form, and search for the best
  one over a probe set.
* :func:`reduce_convolution` / :func:`reduce_correlation` check that a
  convolution (correlation) process sandwiched between inverse and forward
  QFTs would produce the componentwise product, which is why convolution is
  impossible as well.
"""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import InvalidInputError, ZeroOverlapError
from .qsim import (
    LinearMap,
    QuantumState,
    apply,
    iqft_dense,
    qft_dense,
    tensor,
)
from .spectral import convolve_direct, correlate_direct, is_power_of_two, normalize

__all__ = [
    "CandidateProcess",
    "EpsilonFamily",
    "ResidualReport",
    "AnalyticReport",
    "TargetSpec",
    "SearchResult",
    "epsilon_states",
    "target_product",
    "residual",
    "normalization_expression",
    "constraint_surface",
    "paper_contradiction_check",
    "load_probe_set",
    "probe_set_names",
    "search_best_candidate",
    "classical_convolution_oracle",
    "classical_correlation_oracle",
    "reduce_convolution",
    "reduce_correlation",
]


@dataclass(frozen=True)
class CandidateProcess:
    """Linear map on ``N*N*M`` dimensions plus the ancilla it consumes.

    Input and output are both laid out as ``|r>|s>|t>`` with ``r, s`` in
    ``range(N)`` and ``t`` in ``range(M)``.
    """

    map: LinearMap
    ancilla: np.ndarray

    def __post_init__(self):
        c = np.array(self.ancilla, dtype=np.complex128).reshape(-1)
        if abs(np.linalg.norm(c) - 1.0) > 1e-10:
            raise InvalidInputError("ancilla must be a unit vector")
        m = c.shape[0]
        rows, cols = self.map.matrix.shape
        if rows != cols or rows % m:
            raise InvalidInputError("map must be square with dimension N*N*M")
        n = math.isqrt(rows // m)
        if n * n * m != rows:
            raise InvalidInputError("map dimension is not N*N*M")
        c.flags.writeable = False
        object.__setattr__(self, "ancilla", c)

    @property
    def M(self) -> int:
        return self.ancilla.shape[0]

    @property
    def N(self) -> int:
        return math.isqrt(self.map.rows // self.M)

    def output(self, a: QuantumState, b: QuantumState) -> np.ndarray:
        """Unnormalized image of ``a (x) b (x) ancilla``."""
        if a.dim != self.N or b.dim != self.N:
            raise InvalidInputError(
                f"candidate expects {self.N}-dimensional registers")
        vec = np.kron(np.kron(a.amplitudes, b.amplitudes), self.ancilla)
        return self.map.matrix @ vec


@dataclass(frozen=True)
class EpsilonFamily:
    epsilon: float
    num_qubits: int

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise InvalidInputError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.num_qubits < 1:
            raise InvalidInputError("num_qubits must be >= 1")

    def states(self) -> tuple[QuantumState, QuantumState]:
        return epsilon_states(self.epsilon, self.num_qubits)


@dataclass(frozen=True)
class ResidualReport:
    norm_deviation: float
    factor_infidelity: float
    total: float


@dataclass(frozen=True)
class AnalyticReport:
    C1: float
    C2: float
    M: int
    N: int
    lhs_values: dict
    contradiction: bool
    failed_at: tuple[float, ...]


@dataclass(frozen=True)
class TargetSpec:
    first_register: QuantumState
    lam: float


def epsilon_states(eps: float, num_qubits: int) -> tuple[QuantumState, QuantumState]:
    """``a = (eps, sqrt(1 - eps^2), 0, ...)`` and ``b = |0>``."""
    if not 0.0 < eps < 1.0:
        raise InvalidInputError(f"epsilon must lie in (0, 1), got {eps}")
    if num_qubits < 1:
        raise InvalidInputError("num_qubits must be >= 1")
    dim = 2 ** num_qubits
    a = np.zeros(dim, dtype=np.complex128)
    a[0], a[1] = eps, math.sqrt(1.0 - eps * eps)
    b = np.zeros(dim, dtype=np.complex128)
    b[0] = 1.0
    return QuantumState(a), QuantumState(b)


def target_product(a: QuantumState, b: QuantumState,
                   conjugate_first: bool = False) -> TargetSpec:
    """Normalized componentwise product ``lambda * a_i * b_i`` (or ``conj(a_i) * b_i``)."""
    if a.dim != b.dim:
        raise InvalidInputError("states must have the same dimension")
    first = a.amplitudes.conj() if conjugate_first else a.amplitudes
    prod = first * b.amplitudes
    norm = float(np.linalg.norm(prod))
    if norm == 0.0:
        raise ZeroOverlapError("componentwise product of the inputs is zero")
    return TargetSpec(QuantumState(prod / norm), 1.0 / norm)


def _totals(phi: np.ndarray, targets: np.ndarray, n: int):
    """Residual pieces for outputs ``phi[..., p, :]`` against ``targets[p]``."""
    sq = np.einsum("...d,...d->...", phi.real, phi.real) \
        + np.einsum("...d,...d->...", phi.imag, phi.imag)
    norm_dev = np.abs(np.sqrt(sq) - 1.0)
    blocks = phi.reshape(*phi.shape[:-1], n, phi.shape[-1] // n)
    proj = np.einsum("pr,...prs->...ps", targets.conj(), blocks)
    overlap = np.einsum("...s,...s->...", proj.real, proj.real) \
        + np.einsum("...s,...s->...", proj.imag, proj.imag)
    with np.errstate(divide="ignore", invalid="ignore"):
        infid = np.where(sq > 0.0, 1.0 - overlap / np.where(sq > 0.0, sq, 1.0), 1.0)
    infid = np.clip(infid, 0.0, 1.0)
    return norm_dev, infid


def residual(candidate: CandidateProcess, a: QuantumState, b: QuantumState,
             conjugate_first: bool = False) -> ResidualReport:
    """Distance of the candidate's output from ``target (x) (unit vector)``.

    ``norm_deviation`` is ``| ||phi|| - 1 |``. ``factor_infidelity`` is
    ``1 - <t|rho_1|t> / tr(rho_1)`` with ``rho_1`` the first-register reduced
    density matrix of ``phi``; it ignores whatever the other registers hold.
    A zero output has infidelity 1 by convention.
    """
    target = target_product(a, b, conjugate_first)
    phi = candidate.output(a, b)
    nd, inf = _totals(phi[None, :], target.first_register.amplitudes[None, :], a.dim)
    nd, inf = float(nd[0]), float(inf[0])
    return ResidualReport(nd, inf, nd + inf)


# -- analytic check on the epsilon family ----------------------------------

def normalization_expression(eps, C1: float, C2: float, M: int, N: int):
    """``MN C2^2 + eps^2 MN (C1^2 - C2^2) + 2 eps sqrt(1 - eps^2) MN C1 C2``.

    The squared norm of the free second factor when its coefficients are
    ``eps*C1 + sqrt(1 - eps^2)*C2`` on every one of the ``M*N`` labels.
    """
    eps = np.asarray(eps, dtype=float)
    mn = M * N
    return (mn * C2 ** 2 + eps ** 2 * mn * (C1 ** 2 - C2 ** 2)
            + 2.0 * eps * np.sqrt(1.0 - eps ** 2) * mn * C1 * C2)


def constraint_surface(M: int, N: int) -> list[tuple[float, float]]:
    """All real ``(C1, C2)`` with ``f(0) = f(1) = 1``: ``C2 = +-1/sqrt(MN)``, ``C1 = +-C2``."""
    c = 1.0 / math.sqrt(M * N)
    return [(s1 * c, s2 * c) for s2 in (1.0, -1.0) for s1 in (1.0, -1.0)]


def paper_contradiction_check(C1: float, C2: float, M: int, N: int,
                              tol: float = 1e-12) -> AnalyticReport:
    """Evaluate the normalization identity at ``eps`` in ``{0, 1/2, 1}``.

    Normalization demands ``f(eps) = 1`` for every ``eps``. ``f(0) = 1`` forces
    ``C2^2 = 1/(MN)`` and ``f(1) = 1`` forces ``C1^2 = C2^2``, after which
    ``f(1/2) = 1 +- sqrt(3)/2``, so the three demands are never met together.
    ``contradiction`` is true when at least one of them fails at the given
    constants; ``failed_at`` lists the offending ``eps`` values.
    """
    if M < 1 or N < 1:
        raise InvalidInputError("M and N must be >= 1")
    points = (0.0, 0.5, 1.0)
    values = {e: float(normalization_expression(e, C1, C2, M, N)) for e in points}
    failed = tuple(e for e in points if abs(values[e] - 1.0) > tol)
    return AnalyticReport(C1=float(C1), C2=float(C2), M=M, N=N, lhs_values=values,
                          contradiction=bool(failed), failed_at=failed)


# -- probe sets ------------------------------------------------------------

def _probe_config() -> dict:
    text = resources.files("qconv").joinpath("probe_sets.json").read_text()
    return json.loads(text)


def probe_set_names() -> list[str]:
    return sorted(_probe_config())


def load_probe_set(name: str = "standard-v1",
                   num_qubits: int = 1) -> list[tuple[QuantumState, QuantumState]]:
    """Named, versioned probe pairs on ``num_qubits``-qubit registers.

    Product-family states live on labels 0 and 1; for larger registers they
    are zero-padded.
    """
    cfg = _probe_config()
    if name not in cfg:
        raise InvalidInputError(f"unknown probe set {name!r}; have {sorted(cfg)}")
    entry = cfg[name]
    dim = 2 ** num_qubits
    probes = [epsilon_states(e, num_qubits) for e in entry["epsilons"]]

    def real_pair(angle):
        v = np.zeros(dim, dtype=np.complex128)
        v[0], v[1] = math.cos(angle), math.sin(angle)
        return QuantumState(v)

    for t in entry["theta_over_pi"]:
        for f in entry["phi_over_pi"]:
            probes.append((real_pair(math.pi * t), real_pair(math.pi * f)))
    return probes


# -- numerical search ------------------------------------------------------

@dataclass
class SearchResult:
    candidate: CandidateProcess
    worst_case_residual: float
    per_probe_residuals: list[float]
    restart_residuals: list[float]
    best_restart: int
    N: int
    M: int
    seed: int
    restarts: int
    budget: int
    probe_set_id: str = "custom"
    wall_time_ms: float = 0.0

    def __iter__(self):
        # unpacks as (candidate, worst_case_residual)
        return iter((self.candidate, self.worst_case_residual))

    def to_report(self) -> dict:
        return {
            "N": self.N,
            "M": self.M,
            "seed": self.seed,
            "restarts": self.restarts,
            "budget": self.budget,
            "probe_set_id": self.probe_set_id,
            "best_residual": self.worst_case_residual,
            "per_probe_residuals": list(self.per_probe_residuals),
            "wall_time_ms": self.wall_time_ms,
        }


class _Objective:
    """Worst-case residual over a fixed probe set as a function of real parameters.

    Parameter layout: ``Re L``, ``Im L`` (row-major, ``D*D`` each, ``D = N*N*M``),
    then ``Re c``, ``Im c`` for the ancilla (normalized inside).
    """

    def __init__(self, probes, N: int, M: int, conjugate_first: bool,
                 temperature: float):
        self.N, self.M = N, M
        self.D = N * N * M
        self.size = 2 * self.D * self.D + 2 * M
        self.inputs = np.array([np.kron(a.amplitudes, b.amplitudes) for a, b in probes])
        self.targets = np.array([target_product(a, b, conjugate_first).first_register.amplitudes
                                 for a, b in probes])
        self.temperature = temperature

    def unpack(self, x: np.ndarray):
        x = np.atleast_2d(x)
        dd = self.D * self.D
        L = (x[:, :dd] + 1j * x[:, dd:2 * dd]).reshape(-1, self.D, self.D)
        c = x[:, 2 * dd:2 * dd + self.M] + 1j * x[:, 2 * dd + self.M:]
        cn = np.linalg.norm(c, axis=1, keepdims=True)
        c = np.where(cn > 0, c / np.where(cn > 0, cn, 1.0), 0.0)
        return L, c

    def per_probe(self, x: np.ndarray) -> np.ndarray:
        L, c = self.unpack(x)
        # rows of X are inputs (x) ancilla, one block per candidate
        X = (self.inputs[None, :, :, None] * c[:, None, None, :]).reshape(
            c.shape[0], -1, self.D)
        phi = X @ L.transpose(0, 2, 1)
        nd, inf = _totals(phi, self.targets, self.N)
        return nd + inf

    def smooth(self, x: np.ndarray) -> np.ndarray:
        r = self.per_probe(x)
        t = self.temperature
        top = r.max(axis=1, keepdims=True)
        return top[:, 0] + t * np.log(np.mean(np.exp((r - top) / t), axis=1))

    def value(self, x: np.ndarray) -> float:
        return float(self.smooth(x)[0])

    def gradient(self, x: np.ndarray, h: float = 1e-7) -> np.ndarray:
        """Central finite differences, all coordinates evaluated in one batch."""
        steps = np.eye(self.size) * h
        f = self.smooth(np.concatenate((x + steps, x - steps)))
        return (f[:self.size] - f[self.size:]) / (2.0 * h)

    def probe_jacobian(self, x: np.ndarray, h: float = 1e-7) -> np.ndarray:
        """Central-difference Jacobian of the per-probe residuals, shape ``(P, size)``."""
        steps = np.eye(self.size) * h
        r = self.per_probe(np.concatenate((x + steps, x - steps)))
        return ((r[:self.size] - r[self.size:]) / (2.0 * h)).T


def _restart_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def _descend(obj: _Objective, seed: int, index: int, budget: int):
    rng = _restart_rng(seed, index)
    x0 = rng.standard_normal(obj.size) / math.sqrt(obj.D)
    res = minimize(obj.value, x0, jac=obj.gradient, method="L-BFGS-B",
                   options={"maxiter": budget, "maxfun": 2 * budget,
                            "gtol": 1e-10, "ftol": 1e-15})
    return float(obj.per_probe(res.x)[0].max()), res.x


def _polish(obj: _Objective, x: np.ndarray, budget: int) -> np.ndarray:
    """Minimize ``t`` subject to ``residual_p(x) <= t`` for every probe (SLSQP)."""
    n = obj.size
    z0 = np.append(x, obj.per_probe(x)[0].max())
    grad_t = np.zeros(n + 1)
    grad_t[-1] = 1.0

    def slack(z):
        return z[-1] - obj.per_probe(z[:-1])[0]

    def slack_jac(z):
        jac = -obj.probe_jacobian(z[:-1])
        return np.hstack((jac, np.ones((jac.shape[0], 1))))

    res = minimize(lambda z: z[-1], z0, jac=lambda z: grad_t, method="SLSQP",
                   constraints=[{"type": "ineq", "fun": slack, "jac": slack_jac}],
                   options={"maxiter": budget, "ftol": 1e-12})
    # SLSQP may end at a slightly infeasible point; keep whichever is truly better
    if obj.per_probe(res.x[:-1])[0].max() < obj.per_probe(x)[0].max():
        return res.x[:-1]
    return x


def search_best_candidate(N: int, M: int,
                          probes: Sequence[tuple[QuantumState, QuantumState]],
                          restarts: int = 50, budget: int = 100, seed: int = 0,
                          conjugate_first: bool = False, temperature: float = 0.003,
                          polish: int = 5, probe_set_id: str = "custom",
                          workers: int = 1) -> SearchResult:
    """Random-restart search for the linear candidate with least worst-case residual.

    Each restart draws Gaussian parameters from the seed sequence
    ``(seed, restart_index)`` and runs L-BFGS on a log-sum-exp smoothing of
    the max over probes (``temperature``), with batched central-difference
    gradients. The ``polish`` restarts with the lowest worst-case residual
    are then refined by SLSQP on the exact minimax (epigraph) form.
    ``budget`` caps the iterations of each stage.

    The winner is the restart with the smallest worst-case residual, ties
    going to the lower index, so the result depends only on ``seed`` and
    not on ``workers``.
    """
    if not (is_power_of_two(N) and N >= 2 and is_power_of_two(M)):
        raise InvalidInputError("N must be a power of two >= 2 and M a power of two >= 1")
    if not probes:
        raise InvalidInputError("probe set is empty")
    if restarts < 1 or budget < 1:
        raise InvalidInputError("restarts and budget must be >= 1")
    for a, b in probes:
        if a.dim != N or b.dim != N:
            raise InvalidInputError(f"probe states must be {N}-dimensional")

    start = time.perf_counter()
    obj = _Objective(probes, N, M, conjugate_first, temperature)
    run = lambda i: _descend(obj, seed, i, budget)  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            outcomes = list(pool.map(run, range(restarts)))
    else:
        outcomes = [run(i) for i in range(restarts)]

    scores = [o[0] for o in outcomes]
    params = [o[1] for o in outcomes]
    for i in sorted(range(restarts), key=lambda i: (scores[i], i))[:polish]:
        params[i] = _polish(obj, params[i], budget)
        scores[i] = float(obj.per_probe(params[i])[0].max())

    best = min(range(restarts), key=lambda i: (scores[i], i))
    x = params[best]
    per = obj.per_probe(x)[0]
    L, c = obj.unpack(x)
    candidate = CandidateProcess(LinearMap(L[0]), c[0])
    return SearchResult(
        candidate=candidate,
        worst_case_residual=scores[best],
        per_probe_residuals=[float(v) for v in per],
        restart_residuals=scores,
        best_restart=best,
        N=N, M=M, seed=seed, restarts=restarts, budget=budget,
        probe_set_id=probe_set_id,
        wall_time_ms=(time.perf_counter() - start) * 1e3,
    )


# -- reductions: convolution/correlation would yield the product -----------

Oracle = Callable[[QuantumState, np.ndarray, np.ndarray], QuantumState]


# inputs are unit vectors, so a result this small is cancellation noise
_ZERO_RESULT = 1e-12


def _encode(seq: np.ndarray) -> QuantumState:
    return QuantumState(normalize(seq, tol=_ZERO_RESULT).values)


def classical_convolution_oracle(joint: QuantumState, alpha: np.ndarray,
                                 beta: np.ndarray) -> QuantumState:
    """Stand-in for a hypothetical convolution process.

    It cheats: instead of acting on ``joint`` it reads the coefficient
    vectors directly and builds the normalized cyclic convolution.
    """
    if joint.dim != alpha.shape[0] * beta.shape[0]:
        raise InvalidInputError("joint state does not match the coefficient vectors")
    return _encode(convolve_direct(alpha, beta))


def classical_correlation_oracle(joint: QuantumState, alpha: np.ndarray,
                                 beta: np.ndarray) -> QuantumState:
    if joint.dim != alpha.shape[0] * beta.shape[0]:
        raise InvalidInputError("joint state does not match the coefficient vectors")
    return _encode(correlate_direct(alpha, beta))


def _reduce(oracle: Oracle, a: QuantumState, b: QuantumState) -> QuantumState:
    if a.dim != b.dim:
        raise InvalidInputError("both registers need the same number of qubits")
    inv = iqft_dense(a.num_qubits)
    alpha = apply(inv, a)
    beta = apply(inv, b)
    # (IQFT (x) IQFT)(a (x) b) is the product of the transformed factors
    joint = tensor(alpha, beta)
    out = oracle(joint, alpha.amplitudes, beta.amplitudes)
    return apply(qft_dense(a.num_qubits), out)


def reduce_convolution(oracle: Oracle | None, a: QuantumState,
                       b: QuantumState) -> QuantumState:
    """``QFT . P . (IQFT (x) IQFT)`` applied to ``a (x) b``.

    With ``P`` any convolution process (default: the classical stand-in),
    the output equals ``target_product(a, b).first_register``.

    Raises
    ------
    ZeroNormError
        If the convolution vanishes, i.e. ``a`` and ``b`` have disjoint support.
    """
    return _reduce(oracle or classical_convolution_oracle, a, b)


def reduce_correlation(oracle: Oracle | None, a: QuantumState,
                       b: QuantumState) -> QuantumState:
    """As :func:`reduce_convolution`; the output is the conjugated product target."""
    return _reduce(oracle or classical_correlation_oracle, a, b)
