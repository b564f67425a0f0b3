"""
A convolution process would yield the componentwise product
============================================================

Suppose some process P mapped the pair of states with amplitudes alpha and
beta to the normalized convolution of alpha and beta. Apply the inverse QFT
to both registers first, run P, then the forward QFT: the result is
lambda * sum_i a_i b_i |i>, which no linear process can produce. Here P is a
classical stand-in that reads the amplitudes directly.
"""

import numpy as np

from qconv import nogo, qsim

rng = np.random.default_rng(2)

a, b = qsim.random_state(4, rng), qsim.random_state(4, rng)
out = nogo.reduce_convolution(None, a, b)
target = nogo.target_product(a, b)
print(f"convolution route vs product target: {np.abs(out.amplitudes - target.first_register.amplitudes).max():.1e}")
print(f"normalization factor lambda = {target.lam:.4f}")

out = nogo.reduce_correlation(None, a, b)
target = nogo.target_product(a, b, conjugate_first=True)
print(f"correlation route vs conjugated target: {np.abs(out.amplitudes - target.first_register.amplitudes).max():.1e}")

# The stand-in has to see the amplitudes. A genuine quantum process only
# has the joint state, and that is the gap the no-go result is about.
def honest_oracle(joint, alpha, beta):
    raise RuntimeError("no linear map on the joint state computes the normalized convolution")

try:
    nogo.reduce_convolution(honest_oracle, a, b)
except RuntimeError as exc:
    print("honest oracle:", exc)
