import cmath
import math

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20031020)


def complex_normal(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


# Textbook loops kept deliberately naive: they share no code with the package.

def naive_dft(x, sign=+1):
    n = len(x)
    return [sum(x[k] * cmath.exp(sign * 2j * math.pi * j * k / n) for k in range(n)) / math.sqrt(n)
            for j in range(n)]


def naive_convolve(a, b):
    n = len(a)
    return [sum(a[j] * b[(k - j) % n] for j in range(n)) for k in range(n)]


def naive_correlate(a, b):
    n = len(a)
    return [sum(a[j].conjugate() * b[(k + j) % n] for j in range(n)) for k in range(n)]
