"""
Classical convolution with unitary transforms
==============================================

Cyclic convolution computed two ways: the direct O(N^2) sum, and the fast
route (transform both inputs, multiply componentwise, transform back,
rescale by sqrt(N)).
"""

import math

import numpy as np

from qconv import spectral

rng = np.random.default_rng(0)

# the smallest hand-checkable case: [1, 2] * [3, 4] = [1*3 + 2*4, 1*4 + 2*3]
print("direct:", spectral.convolve_direct([1, 2], [3, 4]).real)
print("fast:  ", spectral.convolve_fast([1, 2], [3, 4]).real.round(12))

# The forward transform uses exp(+2 pi i jk/N) / sqrt(N). With that
# normalization the convolution theorem carries a sqrt(N) factor.
n = 256
a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
lhs = spectral.dft(spectral.convolve_direct(a, b))
rhs = math.sqrt(n) * spectral.fft(a) * spectral.fft(b)
print(f"convolution theorem error at N={n}: {np.abs(lhs - rhs).max():.2e}")

# correlation conjugates the first spectrum instead
lhs = spectral.dft(spectral.correlate_direct(a, b))
rhs = math.sqrt(n) * spectral.fft(a).conj() * spectral.fft(b)
print(f"correlation theorem error at N={n}: {np.abs(lhs - rhs).max():.2e}")

# Zero padding: appending N zeros keeps the cyclic result from vanishing.
# The first nonzero convolution entry sits at i0 + j0.
x, y = np.array([0, 0, 2, 1]), np.array([0, 3, 0, 0])
conv = spectral.convolve_direct(spectral.pad_zeros(x), spectral.pad_zeros(y))
print("padded convolution:", conv.real, "-> first nonzero at", np.flatnonzero(conv)[0])
