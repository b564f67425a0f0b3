"""Classical DFT, radix-2 FFT, cyclic convolution and correlation.

All transforms use the unitary 1/sqrt(N) normalization, and the *forward*
transform carries the positive exponent::

    dft(x)[j]  = 1/sqrt(N) * sum_k x[k] * exp(+2*pi*i*j*k/N)
    idft(x)[k] = 1/sqrt(N) * sum_j x[j] * exp(-2*pi*i*j*k/N)

This is the opposite sign from ``numpy.fft.fft``; it is chosen so that the
classical transform coincides with the action of the QFT on amplitudes.

Sequences are plain ``complex128`` numpy arrays. Every function acts along
the last axis, so a stack of sequences of shape ``(batch, N)`` is processed
in one call. The direct O(N^2) sums (``dft``, ``idft``, ``convolve_direct``,
``correlate_direct``) are the reference oracles for the fast paths.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, ZeroNormError

__all__ = [
    "NormalizedSequence",
    "as_sequence",
    "is_power_of_two",
    "dft",
    "idft",
    "fft",
    "ifft",
    "convolve_direct",
    "correlate_direct",
    "convolve_fast",
    "correlate_fast",
    "pad_zeros",
    "normalize",
    "read_sequence",
    "write_sequence",
    "sequence_to_json",
    "sequence_from_json",
]

# caps the twiddle block held in memory by the direct sums (elements)
_DIRECT_BLOCK = 1 << 21


@dataclass(frozen=True)
class NormalizedSequence:
    """Unit-norm sequence together with the norm that was divided out."""

    values: np.ndarray
    scale: float

    def restore(self) -> np.ndarray:
        return self.scale * self.values


def as_sequence(s) -> np.ndarray:
    """Coerce to a finite complex128 array with a non-empty last axis."""
    arr = np.asarray(s, dtype=np.complex128)
    if arr.ndim == 0:
        raise InvalidInputError("a sequence must be at least one-dimensional")
    if arr.shape[-1] == 0:
        raise InvalidInputError("empty sequence")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("sequence contains NaN or Inf")
    return arr


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _direct_transform(x: np.ndarray, sign: int) -> np.ndarray:
    n = x.shape[-1]
    # exact phases: index the N-th roots of unity by (j*k mod N)
    roots = np.exp(sign * 2j * np.pi * np.arange(n) / n)
    k = np.arange(n)
    out = np.empty(x.shape, dtype=np.complex128)
    rows = max(1, _DIRECT_BLOCK // n)
    for start in range(0, n, rows):
        j = k[start:start + rows, None]
        kernel = roots[(j * k) % n]
        out[..., start:start + rows] = x @ kernel.T
    return out / math.sqrt(n)


def dft(s) -> np.ndarray:
    """Forward DFT by direct summation. Works for any length N >= 1."""
    return _direct_transform(as_sequence(s), +1)


def idft(s) -> np.ndarray:
    """Inverse DFT by direct summation. Works for any length N >= 1."""
    return _direct_transform(as_sequence(s), -1)


def _bit_reversal(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def _radix2(x: np.ndarray, sign: int) -> np.ndarray:
    n = x.shape[-1]
    if not is_power_of_two(n):
        raise InvalidInputError(f"fft length must be a power of two, got {n}")
    batch = x.shape[:-1]
    a = x[..., _bit_reversal(n)]
    size = 2
    while size <= n:
        half = size // 2
        w = np.exp(sign * 2j * np.pi * np.arange(half) / size)
        blocks = a.reshape(*batch, n // size, size)
        even = blocks[..., :half]
        odd = blocks[..., half:] * w
        a = np.concatenate((even + odd, even - odd), axis=-1).reshape(*batch, n)
        size *= 2
    return a / math.sqrt(n)


def fft(s) -> np.ndarray:
    """Iterative radix-2 decimation-in-time FFT; same result as :func:`dft`.

    Raises
    ------
    InvalidInputError
        If the length is not a power of two.
    """
    return _radix2(as_sequence(s), +1)


def ifft(s) -> np.ndarray:
    """Radix-2 inverse FFT; same result as :func:`idft`."""
    return _radix2(as_sequence(s), -1)


def _pair(s1, s2) -> tuple[np.ndarray, np.ndarray]:
    a, b = as_sequence(s1), as_sequence(s2)
    if a.shape[-1] != b.shape[-1]:
        raise InvalidInputError(
            f"length mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    return a, b


def _shift_table(n: int, sign: int) -> np.ndarray:
    k = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    return (k + sign * j) % n


def convolve_direct(s1, s2) -> np.ndarray:
    """Cyclic convolution ``c[k] = sum_j s1[j] * s2[(k - j) mod N]``."""
    a, b = _pair(s1, s2)
    idx = _shift_table(a.shape[-1], -1)
    return np.einsum("...j,...kj->...k", a, b[..., idx])


def correlate_direct(s1, s2) -> np.ndarray:
    """Cyclic correlation ``c[k] = sum_j conj(s1[j]) * s2[(k + j) mod N]``."""
    a, b = _pair(s1, s2)
    idx = _shift_table(a.shape[-1], +1)
    return np.einsum("...j,...kj->...k", a.conj(), b[..., idx])


def convolve_fast(s1, s2) -> np.ndarray:
    """Convolution via transform, componentwise product, inverse, sqrt(N) rescale."""
    a, b = _pair(s1, s2)
    n = a.shape[-1]
    return ifft(fft(a) * fft(b)) * math.sqrt(n)


def correlate_fast(s1, s2) -> np.ndarray:
    """As :func:`convolve_fast`, conjugating the first spectrum before the product."""
    a, b = _pair(s1, s2)
    n = a.shape[-1]
    return ifft(fft(a).conj() * fft(b)) * math.sqrt(n)


def pad_zeros(s) -> np.ndarray:
    """Append N zeros to a length-N sequence (one extra qubit of room).

    Padding both inputs guarantees a nonzero cyclic convolution and
    correlation whenever both inputs are nonzero.
    """
    a = as_sequence(s)
    return np.concatenate((a, np.zeros_like(a)), axis=-1)


def normalize(s, tol: float = 0.0) -> NormalizedSequence:
    """Scale a 1-D sequence to unit Euclidean norm.

    Raises
    ------
    ZeroNormError
        If the norm is not strictly greater than ``tol``.
    """
    a = as_sequence(s)
    if a.ndim != 1:
        raise InvalidInputError("normalize expects a single 1-D sequence")
    scale = float(np.linalg.norm(a))
    if scale <= tol:
        raise ZeroNormError("cannot normalize an all-zero sequence")
    return NormalizedSequence(values=a / scale, scale=scale)


# -- file format: JSON array of [re, im] pairs ------------------------------

def _reject_constant(token: str):
    raise InvalidInputError(f"non-finite number {token!r} in sequence file")


def sequence_from_json(text: str) -> np.ndarray:
    try:
        raw = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"malformed sequence JSON: {exc}") from exc
    if not isinstance(raw, list) or not raw:
        raise InvalidInputError("sequence file must hold a non-empty JSON array")
    values = []
    for item in raw:
        if (not isinstance(item, list) or len(item) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                           for v in item)):
            raise InvalidInputError(f"expected [re, im] pair, got {item!r}")
        values.append(complex(item[0], item[1]))
    return as_sequence(values)


def sequence_to_json(s) -> str:
    a = as_sequence(s)
    if a.ndim != 1:
        raise InvalidInputError("only 1-D sequences can be serialized")
    pairs = ", ".join(f"[{z.real:.17g}, {z.imag:.17g}]" for z in a)
    return f"[{pairs}]"


def read_sequence(path) -> np.ndarray:
    return sequence_from_json(Path(path).read_text())


def write_sequence(path, s) -> None:
    Path(path).write_text(sequence_to_json(s) + "\n")
