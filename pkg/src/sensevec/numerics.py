"""Numerically stable primitives shared across the package.

Everything here works elementwise on float64 numpy arrays (scalars are
accepted and returned as Python floats).  The hot training loop calls these
thousands of times per second, so the implementations avoid data-dependent
Python loops.
"""

from __future__ import annotations

import numpy as np

# Asymptotic series for psi(x): ln x - 1/(2x) - sum B_2n / (2n x^2n).
# Coefficients are -B_2n/(2n) for n = 1..4.  With the argument shifted to
# x >= 14 the first omitted term is below 3e-14, inside the 1e-12 error
# budget.
_PSI_COEFFS = (
    -1.0 / 12.0,
    1.0 / 120.0,
    -1.0 / 252.0,
    1.0 / 240.0,
)

_SHIFT = 14
_SHIFT_OFFSETS = np.arange(_SHIFT, dtype=np.float64)


def _digamma_core(arr: np.ndarray) -> np.ndarray:
    """Unvalidated digamma over a positive float64 array (hot path)."""
    # upward recurrence: psi(x) = psi(x + 14) - sum_{j=0..13} 1/(x+j)
    shift = (1.0 / (arr[..., np.newaxis] + _SHIFT_OFFSETS)).sum(axis=-1)
    xs = arr + float(_SHIFT)
    inv2 = 1.0 / (xs * xs)
    acc = _PSI_COEFFS[-1]
    for c in _PSI_COEFFS[-2::-1]:
        acc = acc * inv2 + c
    return np.log(xs) - 0.5 / xs + acc * inv2 - shift


def digamma(x):
    """Digamma psi(x) for x > 0.

    Uses the upward recurrence applied a fixed number of times (shift to
    x + 10), then the asymptotic series; the fixed shift keeps the
    evaluation branch-free and vectorized.  Absolute error < 1e-12 on
    (0, inf).
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.size and arr.min() <= 0.0:
        raise ValueError("digamma requires positive arguments")
    out = _digamma_core(arr)
    if np.ndim(x) == 0:
        return float(out)
    return out


def log_sigmoid(x):
    """log(sigma(x)) computed as -softplus(-x); finite for all finite x."""
    return -np.logaddexp(0.0, -np.asarray(x, dtype=np.float64))


def logsumexp(a):
    """log(sum(exp(a))) over a 1-D array with max-shift stabilization."""
    a = np.asarray(a, dtype=np.float64)
    m = a.max()
    if not np.isfinite(m):
        return float(m)
    return float(m + np.log(np.exp(a - m).sum()))


def softmax(a):
    """exp(a) / sum(exp(a)) with max-shift; exact [1.0] for length-1 input."""
    a = np.asarray(a, dtype=np.float64)
    e = np.exp(a - a.max())
    return e / e.sum()
