"""Command-line runner for the spectral, QFT, no-go and post-selection checks.

Every subcommand prints a JSON report to stdout and exits with

* 0 when every checked property holds,
* 1 when a property is violated (the report lists which),
* 2 on malformed input (bad flags, unreadable or invalid files).

Flags override values from ``--config``; environment variables are never read.
"""
from __future__ import annotations

import argparse
import json
import math
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import nogo, postselect, qsim, spectral
from .errors import InvalidInputError

COMMANDS = ("conv", "corr", "qft-check", "reduction", "nogo-analytic",
            "nogo-search", "postselect-scan")

CONSTRUCTION = {
    "conv": "fft-convolution: transform, componentwise product, inverse, sqrt(N) rescale",
    "corr": "fft-correlation: as fft-convolution with the first spectrum conjugated",
    "qft-check": "qft-coefficient-bridge: QFT amplitudes equal the classical DFT",
    "reduction": "qft-sandwich-reduction: QFT . P . (IQFT x IQFT) gives the componentwise product",
    "nogo-analytic": "epsilon-family-normalization: f(0)=f(1)=1 forces f(1/2)=1+-sqrt(3)/2",
    "nogo-search": "linear-candidate-residual-search: best linear map with ancilla",
    "postselect-scan": "diagonal-postselection: success probability sum_i |a_i b_i|^2",
}

DEFAULTS = {
    "conv": {"tol": 1e-8, "seed": 0},
    "corr": {"tol": 1e-8, "seed": 0},
    "qft-check": {"n": 8, "tol": 1e-10, "seed": 0, "trials": 20},
    "reduction": {"n": 4, "tol": 1e-8, "seed": 0, "trials": 100},
    "nogo-analytic": {"tol": 1e-9, "seed": 0, "trials": 1000},
    "nogo-search": {"n": 1, "M": 1, "tol": 1e-6, "seed": 0, "restarts": 50,
                    "budget": 100, "probe_set": "standard-v1"},
    "postselect-scan": {"n": "1..10", "tol": 3.0, "seed": 0, "trials": 10000,
                        "family": "uniform", "format": "csv"},
}


class UsageError(Exception):
    pass


def _parse_n_range(value) -> list[int]:
    if isinstance(value, int) and not isinstance(value, bool):
        return [value]
    text = str(value)
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(text)]
    except ValueError as exc:
        raise UsageError(f"bad --n value {value!r}") from exc


def _single_n(value) -> int:
    ns = _parse_n_range(value)
    if len(ns) != 1 or ns[0] < 1:
        raise UsageError(f"--n must be a single positive integer here, got {value!r}")
    return ns[0]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qconv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=CONSTRUCTION[name].split(":")[0])
        p.add_argument("--config", type=Path, help="JSON file of option defaults")
        p.add_argument("--seed", type=int)
        p.add_argument("--n", help="qubit count, or a range a..b for postselect-scan")
        p.add_argument("--tol", type=float)
        p.add_argument("--trials", type=int)
        p.add_argument("--restarts", type=int)
        p.add_argument("--budget", type=int)
        p.add_argument("--M", type=int, help="ancilla dimension (nogo-search)")
        p.add_argument("--probe-set", dest="probe_set")
        p.add_argument("--family", choices=postselect.FAMILIES)
        p.add_argument("--input", action="append", type=Path, default=None)
        p.add_argument("--output", type=Path)
        p.add_argument("--format", choices=("csv", "json"))
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Defaults, then the config file, then explicit flags."""
    cfg = dict(DEFAULTS[args.command])
    if args.config is not None:
        try:
            loaded = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        cfg.update({k.replace("-", "_"): v for k, v in loaded.items()})
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        cfg[key] = [str(p) for p in value] if key == "input" else (
            str(value) if isinstance(value, Path) else value)
    if "tol" in cfg and not (isinstance(cfg["tol"], (int, float)) and cfg["tol"] > 0):
        raise UsageError("--tol must be positive")
    return cfg


# -- commands --------------------------------------------------------------

def _two_inputs(cfg) -> tuple[np.ndarray, np.ndarray]:
    paths = cfg.get("input") or []
    if len(paths) != 2:
        raise UsageError("exactly two --input sequence files are required")
    return spectral.read_sequence(paths[0]), spectral.read_sequence(paths[1])


def _run_pairwise(cfg, kind: str):
    s1, s2 = _two_inputs(cfg)
    direct = (spectral.convolve_direct if kind == "conv" else spectral.correlate_direct)(s1, s2)
    results = {"length": int(s1.shape[-1])}
    violations = []
    if spectral.is_power_of_two(s1.shape[-1]):
        fast = (spectral.convolve_fast if kind == "conv" else spectral.correlate_fast)(s1, s2)
        dev = float(np.abs(fast - direct).max())
        results["fast_vs_direct_max_abs"] = dev
        if dev > cfg["tol"]:
            violations.append("fast result differs from direct sum")
    else:
        results["fast_vs_direct_max_abs"] = None
    if cfg.get("output"):
        spectral.write_sequence(cfg["output"], direct)
    results["result"] = [[z.real, z.imag] for z in direct]
    return results, violations


def _run_qft_check(cfg):
    n_max = _single_n(cfg["n"])
    rng = np.random.default_rng(cfg["seed"])
    rows, violations = [], []
    for n in range(1, n_max + 1):
        q = qsim.qft_dense(n)
        bridge = 0.0
        for _ in range(cfg["trials"]):
            s = qsim.random_state(n, rng)
            bridge = max(bridge, float(np.abs(
                qsim.apply(q, s).amplitudes - spectral.dft(s.amplitudes)).max()))
            inv = qsim.apply(qsim.iqft_dense(n), s).amplitudes
            bridge = max(bridge, float(np.abs(inv - spectral.idft(s.amplitudes)).max()))
        circuit = qsim.qft_circuit(n)
        circ_dev = float(np.abs(circuit.matrix() - q.matrix).max())
        expected_gates = n * (n + 1) // 2 + n // 2
        rows.append({"n": n, "bridge_max_abs": bridge, "circuit_max_abs": circ_dev,
                     "gate_count": circuit.gate_count, "expected_gate_count": expected_gates})
        if bridge > cfg["tol"]:
            violations.append(f"n={n}: QFT amplitudes differ from DFT")
        if circ_dev > max(cfg["tol"], 1e-9):
            violations.append(f"n={n}: circuit differs from dense QFT")
        if circuit.gate_count != expected_gates:
            violations.append(f"n={n}: gate count {circuit.gate_count} != {expected_gates}")
    return {"rows": rows}, violations


def _run_reduction(cfg):
    n = _single_n(cfg["n"])
    rng = np.random.default_rng(cfg["seed"])
    worst = {"convolution": 0.0, "correlation": 0.0}
    for _ in range(cfg["trials"]):
        a, b = qsim.random_state(n, rng), qsim.random_state(n, rng)
        conv = nogo.reduce_convolution(None, a, b).amplitudes
        corr = nogo.reduce_correlation(None, a, b).amplitudes
        t_conv = nogo.target_product(a, b).first_register.amplitudes
        t_corr = nogo.target_product(a, b, conjugate_first=True).first_register.amplitudes
        worst["convolution"] = max(worst["convolution"], float(np.abs(conv - t_conv).max()))
        worst["correlation"] = max(worst["correlation"], float(np.abs(corr - t_corr).max()))
    violations = [f"{k} reduction deviates by {v:.3g}" for k, v in worst.items()
                  if v > cfg["tol"]]
    return {"pairs": cfg["trials"], "max_deviation": worst}, violations


def _run_nogo_analytic(cfg):
    rng = np.random.default_rng(cfg["seed"])
    target = math.sqrt(3.0) / 2.0
    worst, flags = 0.0, 0
    for _ in range(cfg["trials"]):
        M = 2 ** int(rng.integers(0, 6))
        N = 2 ** int(rng.integers(1, 7))
        points = nogo.constraint_surface(M, N)
        C1, C2 = points[int(rng.integers(len(points)))]
        rep = nogo.paper_contradiction_check(C1, C2, M, N)
        worst = max(worst, abs(abs(rep.lhs_values[0.5] - 1.0) - target))
        flags += rep.contradiction
    violations = []
    if worst > cfg["tol"]:
        violations.append(f"|f(1/2) - 1| misses sqrt(3)/2 by {worst:.3g}")
    if flags != cfg["trials"]:
        violations.append(f"contradiction flag false on {cfg['trials'] - flags} points")
    return {"points": cfg["trials"], "max_deviation_from_sqrt3_over_2": worst,
            "contradictions": flags}, violations


def _run_nogo_search(cfg):
    n = _single_n(cfg["n"])
    probes = nogo.load_probe_set(cfg["probe_set"], n)
    result = nogo.search_best_candidate(
        2 ** n, cfg["M"], probes, restarts=cfg["restarts"], budget=cfg["budget"],
        seed=cfg["seed"], probe_set_id=cfg["probe_set"])
    report = result.to_report()
    report.pop("wall_time_ms")
    violations = []
    if not result.worst_case_residual > cfg["tol"]:
        violations.append("a linear candidate reached the componentwise-product form")
    return report, violations


def _run_postselect_scan(cfg):
    rows = postselect.scan(_parse_n_range(cfg["n"]), family=cfg["family"],
                           trials=cfg["trials"], seed=cfg["seed"])
    violations = []
    for r in rows:
        if not postselect.within_band(r, cfg["tol"]):
            violations.append(f"n={r.n}: empirical {r.empirical_p} outside "
                              f"{cfg['tol']} sigma of {r.analytic_p}")
        if cfg["family"] == "uniform" and r.analytic_p != 1.0 / r.N:
            violations.append(f"n={r.n}: uniform success probability is not 1/N")
    table = [vars(r) for r in rows]
    if cfg.get("output"):
        text = (postselect.scan_to_csv(rows) if cfg["format"] == "csv"
                else json.dumps(table, indent=2) + "\n")
        Path(cfg["output"]).write_text(text)
    return {"rows": table}, violations


RUNNERS = {
    "conv": lambda cfg: _run_pairwise(cfg, "conv"),
    "corr": lambda cfg: _run_pairwise(cfg, "corr"),
    "qft-check": _run_qft_check,
    "reduction": _run_reduction,
    "nogo-analytic": _run_nogo_analytic,
    "nogo-search": _run_nogo_search,
    "postselect-scan": _run_postselect_scan,
}

# commands whose --output receives the report itself
_REPORT_OUTPUT = {"qft-check", "reduction", "nogo-analytic", "nogo-search"}


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        cfg = resolve_config(args)
        results, violations = RUNNERS[args.command](cfg)
    except (UsageError, InvalidInputError, OSError) as exc:
        print(f"qconv {args.command}: {exc}", file=sys.stderr)
        return 2
    report = {
        "command": args.command,
        "construction": CONSTRUCTION[args.command],
        "seed": cfg["seed"],
        "tolerance": cfg["tol"],
        "config": cfg,
        "results": results,
        "ok": not violations,
        "violations": violations,
        "versions": {"qconv": __version__, "numpy": np.__version__,
                     "python": platform.python_version()},
        "wall_time_ms": round((time.perf_counter() - start) * 1e3, 3),
    }
    text = json.dumps(report, indent=2, sort_keys=True)
    print(text)
    if args.command in _REPORT_OUTPUT and cfg.get("output"):
        Path(cfg["output"]).write_text(text + "\n")
    return 0 if not violations else 1


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
