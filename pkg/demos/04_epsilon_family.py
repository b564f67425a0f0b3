"""
The epsilon family and the normalization contradiction
=======================================================

With a = (eps, sqrt(1 - eps^2), 0, ...) and b = |0>, the target product is
always |0> with lambda = 1/eps. If the free second factor then has the
same coefficient eps*C1 + sqrt(1 - eps^2)*C2 on all M*N labels, its squared norm is

    f(eps) = MN C2^2 + eps^2 MN (C1^2 - C2^2) + 2 eps sqrt(1 - eps^2) MN C1 C2

and has to equal 1 for every eps. f(0) = 1 and f(1) = 1 pin C1 and C2 up
to sign, after which f(1/2) = 1 +- sqrt(3)/2.
"""

import math

import numpy as np

from qconv import nogo

for eps in (0.1, 0.5, 0.9):
    a, b = nogo.epsilon_states(eps, 2)
    t = nogo.target_product(a, b)
    print(f"eps={eps}: a={np.round(a.amplitudes.real, 4)}, lambda={t.lam:.4f}")

M, N = 2, 4
for c1, c2 in nogo.constraint_surface(M, N):
    rep = nogo.paper_contradiction_check(c1, c2, M, N)
    print(f"C1={c1:+.4f} C2={c2:+.4f}: f(0)={rep.lhs_values[0.0]:.6f} "
          f"f(1/2)={rep.lhs_values[0.5]:.6f} f(1)={rep.lhs_values[1.0]:.6f} "
          f"fails at eps={rep.failed_at}")
print(f"1 + sqrt(3)/2 = {1 + math.sqrt(3) / 2:.6f}, 1 - sqrt(3)/2 = {1 - math.sqrt(3) / 2:.6f}")
