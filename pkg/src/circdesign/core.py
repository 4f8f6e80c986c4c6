"""Sequence algebra: periodic correlation, shifts, supports and row sums.

Sequences are 1-d numpy arrays and ensembles are 2-d arrays of shape
``(m, n)`` (one member per row).  Every function returns a fresh array; inputs
are never modified.  Integer input stays integer, so correlations of
``{0, +-1}`` sequences are exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "as_sequence",
    "as_ensemble",
    "periodic_correlation",
    "autocorrelation_sum",
    "cyclic_shift",
    "support",
    "row_sum",
    "check_power_sum_condition",
]


def _is_integral(x: np.ndarray) -> bool:
    return x.dtype.kind in "iub"


def as_sequence(a, name: str = "a") -> np.ndarray:
    """Coerce ``a`` to a 1-d array of length at least one."""
    arr = np.asarray(a)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must have length >= 1")
    if arr.dtype.kind == "b":
        arr = arr.astype(np.int64)
    elif arr.dtype.kind not in "iuf":
        raise TypeError(f"{name} must be real-valued, got dtype {arr.dtype}")
    return arr


def as_ensemble(e, name: str = "ensemble") -> np.ndarray:
    """Coerce ``e`` to a 2-d ``(m, n)`` array; a 1-d input becomes ``m = 1``."""
    arr = np.asarray(e)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise ValueError(
            f"{name} must be a list of equal-length sequences, got shape {arr.shape}"
        )
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"{name} must be nonempty, got shape {arr.shape}")
    if arr.dtype.kind not in "iuf":
        raise TypeError(f"{name} must be real-valued, got dtype {arr.dtype}")
    return arr


def periodic_correlation(a, b) -> np.ndarray:
    """Periodic correlation ``(a * b)_s = sum_l a_l b_{(l+s) mod n}``.

    Evaluated directly in O(n^2) rather than through an FFT, so the result is
    exact whenever both inputs are integer arrays.

    Examples
    --------
    >>> periodic_correlation([1, 2, 3], [1, 2, 3]).tolist()
    [14, 11, 11]
    """
    a = as_sequence(a, "a")
    b = as_sequence(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} != {b.size}")
    n = a.size
    dtype = np.int64 if _is_integral(a) and _is_integral(b) else np.float64
    a = a.astype(dtype, copy=False)
    b = b.astype(dtype, copy=False)
    out = np.empty(n, dtype=dtype)
    for s in range(n):
        out[s] = np.dot(a, np.roll(b, -s))
    return out


def autocorrelation_sum(e) -> np.ndarray:
    """Sum of the periodic autocorrelations of every member of an ensemble."""
    e = as_ensemble(e)
    total = periodic_correlation(e[0], e[0])
    for member in e[1:]:
        total = total + periodic_correlation(member, member)
    return total


def cyclic_shift(a, t: int) -> np.ndarray:
    """Shift ``a`` cyclically so that ``result[s] == a[(s - t) mod n]``."""
    a = as_sequence(a)
    return np.roll(a, int(t))


def support(a) -> frozenset[int]:
    """Indices of the nonzero entries of ``a``."""
    a = as_sequence(a)
    return frozenset(int(i) for i in np.flatnonzero(a))


def row_sum(a):
    """Sum of the entries; a Python ``int`` for integer input."""
    a = as_sequence(a)
    if _is_integral(a):
        return int(a.astype(np.int64).sum())
    return float(a.sum())


def _exact(x) -> Fraction:
    if isinstance(x, (np.integer, int)):
        return Fraction(int(x))
    return Fraction(float(x))


def check_power_sum_condition(
    alpha: Iterable[float] | Sequence[float], nu0: float, nu1: float, n: int
) -> bool:
    """Necessary condition for complementary sequences with constant off-peak value.

    If ``sum_j a^j * a^j = (nu0, nu1, ..., nu1)`` and ``alpha_j`` are the row
    sums of the members then ``sum_j alpha_j**2 == nu1 * (n - 1) + nu0``.  The
    comparison is exact (floats are converted to their exact rational value).
    """
    lhs = sum((_exact(a) ** 2 for a in alpha), Fraction(0))
    rhs = _exact(nu1) * (int(n) - 1) + _exact(nu0)
    return lhs == rhs
