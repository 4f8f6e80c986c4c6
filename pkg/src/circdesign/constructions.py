"""Grow circulant weighing matrices from known ones.

``double_cw`` turns two ``CW(n, k^2)`` with disjoint supports (n odd) into a
``CW(2n, 4k^2)``; ``zero_interleave`` spreads a ``CW(n, k^2)`` out to a
``CW(np, k^2)`` by inserting ``p - 1`` zeros after every entry.
"""

from __future__ import annotations

import math

import numpy as np

from circdesign.core import cyclic_shift, support
from circdesign.designs import to_int_ensemble, verify_cw

__all__ = ["ConstructionError", "double_cw", "find_disjoint_shift", "zero_interleave", "cw_weight"]


class ConstructionError(ValueError):
    """A construction's preconditions do not hold."""


def _int_row(a, name: str) -> np.ndarray:
    ints = to_int_ensemble(a)
    if ints is None or ints.shape[0] != 1:
        raise ConstructionError(f"{name} must be a single integer sequence")
    return ints[0]


def cw_weight(a) -> int:
    """``k`` such that ``a`` has ``k^2`` energy; raises if the energy is not a square."""
    a = _int_row(a, "a")
    energy = int(np.dot(a, a))
    k = math.isqrt(energy)
    if k * k != energy or k == 0:
        raise ConstructionError(f"energy {energy} is not a positive perfect square")
    return k


def double_cw(a, b, k: int) -> np.ndarray:
    """Combine two disjoint-support ``CW(n, k^2)`` (n odd) into a ``CW(2n, 4k^2)``.

    Entry ``s`` of the result is ``a[s/2] + b[s/2]`` for even ``s``, and
    ``a[i] - b[i]`` with ``i = (s + n)/2`` for odd ``s <= n - 2`` or
    ``i = (s - n)/2`` for odd ``s > n - 2``.
    """
    a = _int_row(a, "a")
    b = _int_row(b, "b")
    n = a.size
    if b.size != n:
        raise ConstructionError(f"a and b differ in length ({n} != {b.size})")
    if n % 2 == 0:
        raise ConstructionError(f"n must be odd, got {n}")
    for name, seq in (("a", a), ("b", b)):
        check = verify_cw(seq, k)
        if not check:
            raise ConstructionError(f"{name} is not a CW({n},{k * k}): {check.reason}")
    overlap = support(a) & support(b)
    if overlap:
        raise ConstructionError(f"supports of a and b overlap at {sorted(overlap)[:5]}")

    w = np.zeros(2 * n, dtype=np.int64)
    for s in range(2 * n):
        if s % 2 == 0:
            w[s] = a[s // 2] + b[s // 2]
        elif s <= n - 2:
            i = (s + n) // 2
            w[s] = a[i] - b[i]
        else:
            i = (s - n) // 2
            w[s] = a[i] - b[i]

    check = verify_cw(w, 2 * k)
    if not check:  # pragma: no cover - guarded by the preconditions above
        raise ConstructionError(f"doubling produced a non-design: {check.reason}")
    return w


def find_disjoint_shift(a) -> tuple[int, np.ndarray] | None:
    """Smallest ``t`` in ``1..n-1`` whose cyclic shift of ``a`` has support disjoint from ``a``."""
    a = _int_row(a, "a")
    base = support(a)
    for t in range(1, a.size):
        shifted = cyclic_shift(a, t)
        if not base & support(shifted):
            return t, shifted
    return None


def zero_interleave(a, p: int) -> np.ndarray:
    """Insert ``p - 1`` zeros after every entry of a ``CW(n, k^2)``; yields a ``CW(np, k^2)``."""
    a = _int_row(a, "a")
    p = int(p)
    if p < 1:
        raise ConstructionError(f"p must be >= 1, got {p}")
    k = cw_weight(a)
    check = verify_cw(a, k)
    if not check:
        raise ConstructionError(f"input is not a CW({a.size},{k * k}): {check.reason}")
    w = np.zeros(a.size * p, dtype=np.int64)
    w[::p] = a
    return w
