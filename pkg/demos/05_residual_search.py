"""
Searching for a linear map that computes the product
====================================================

The scalar argument above assumes the coefficients do not depend on the
output label. A numerical search makes no such assumption. It optimizes
over every linear map on two qubit registers plus an M-dimensional ancilla,
against a set of input pairs, and reports the smallest achievable
worst-case distance from the required output form. A single input pair can
always be matched exactly. The full probe set cannot.

The acceptance suite runs this with 50 restarts; a handful is enough to
see the floor.
"""

from qconv import nogo, qsim

zero = qsim.basis_state(0, 1)
single = nogo.search_best_candidate(2, 1, [(zero, zero)], restarts=2, budget=200, seed=0)
print(f"one probe pair:        worst-case residual {single.worst_case_residual:.2e}")

probes = nogo.load_probe_set("standard-v1", 1)
for M in (1, 2):
    res = nogo.search_best_candidate(2, M, probes, restarts=5, budget=100, seed=0,
                                     probe_set_id="standard-v1")
    worst_probe = max(range(len(probes)), key=lambda i: res.per_probe_residuals[i])
    print(f"standard-v1, M={M}:     worst-case residual {res.worst_case_residual:.5f} "
          f"(hardest probe #{worst_probe}, {res.wall_time_ms / 1e3:.1f}s)")
