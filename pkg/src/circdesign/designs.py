"""Design families, exact verification and matrix realisations.

A design of circulant type of order ``n`` is an m-tuple of sequences over a
finite alphabet with prescribed row sums ``alpha`` whose periodic
autocorrelations sum to ``v``.  Three families are built in:

=======  ===  ==========  ==========================  =================
family   m    alphabet    v                           row sums
=======  ===  ==========  ==========================  =================
``cw``   1    {0, +-1}    (k^2, 0, ..., 0)            +-k
``dopt`` 2    {+-1}       (2n, 2, ..., 2)             a^2 + b^2 = 4n - 2
``dcc``  2    {+-1}       (2n, -2, ..., -2)           +-1, +-1
=======  ===  ==========  ==========================  =================

Everything in this module that decides whether something *is* a design works
on Python/numpy integers only; no floating point is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from circdesign.core import check_power_sum_condition, periodic_correlation
from circdesign.projections import AlphabetSpec, Constraints
from circdesign.spectral import InfeasibleSpectrumError, SymmetryError, target_spectrum

__all__ = [
    "FAMILIES",
    "InvalidSpecError",
    "UnverifiedDesignError",
    "DesignSpec",
    "Verification",
    "cw_spec",
    "dopt_row_sums",
    "dopt_spec",
    "dcc_spec",
    "custom_spec",
    "spec_for",
    "validate",
    "verify_exact",
    "verify_cw",
    "to_int_ensemble",
    "circulant",
    "build_dopt_matrix",
    "build_dcc_hadamard",
    "exact_determinant",
    "ehlich_bound",
]

FAMILIES = ("cw", "dopt", "dcc", "custom")


class InvalidSpecError(ValueError):
    """Parameters that cannot describe any design."""


class UnverifiedDesignError(ValueError):
    """A matrix construction was handed sequences that are not a design."""


@dataclass(frozen=True)
class DesignSpec:
    """Parameters ``(n, m, alphabet, alpha, v)`` of a design of circulant type.

    ``k`` is set for the ``cw`` family only.  Use the family builders
    (:func:`cw_spec`, :func:`dopt_spec`, :func:`dcc_spec`, :func:`custom_spec`)
    rather than the constructor; they check the family's invariants.
    """

    family: str
    n: int
    m: int
    alphabet: AlphabetSpec
    alpha: tuple[int, ...]
    v: tuple[int, ...]
    k: int | None = None

    @property
    def params(self) -> tuple[int, ...]:
        """Table-style parameter tuple: ``(n, k)`` for CW, ``(n, alpha, beta)`` otherwise."""
        if self.family == "cw":
            return (self.n, self.k)
        return (self.n, *self.alpha)

    @property
    def label(self) -> str:
        return "(" + ",".join(str(p) for p in self.params) + ")"

    @cached_property
    def tau(self) -> np.ndarray:
        return target_spectrum(self.v)

    @cached_property
    def constraints(self) -> Constraints:
        return Constraints(self.alphabet, np.asarray(self.alpha, float), self.tau)


def _check_odd(n: int) -> None:
    if n < 1 or n % 2 == 0:
        raise InvalidSpecError(f"n must be an odd positive integer, got {n}")


def _check_sign(name: str, s: int) -> int:
    if s not in (1, -1):
        raise InvalidSpecError(f"{name} must be +1 or -1, got {s}")
    return int(s)


def cw_spec(n: int, k: int, sum_sign: int = 1) -> DesignSpec:
    """Circulant weighing matrix ``CW(n, k^2)``: one {0, +-1} sequence with ``a * a = (k^2, 0, ..., 0)``."""
    n, k = int(n), int(k)
    if n < 1:
        raise InvalidSpecError(f"n must be >= 1, got {n}")
    if k < 1:
        raise InvalidSpecError(f"k must be >= 1, got {k}")
    if k * k > n:
        raise InvalidSpecError(f"weight k^2 = {k * k} exceeds the order n = {n}")
    sign = _check_sign("sum_sign", sum_sign)
    v = (k * k,) + (0,) * (n - 1)
    return DesignSpec("cw", n, 1, AlphabetSpec.uniform((-1, 0, 1), 1, n), (sign * k,), v, k)


def dopt_row_sums(n: int) -> list[tuple[int, int]]:
    """All ``0 <= alpha <= beta`` with ``alpha^2 + beta^2 == 4n - 2``."""
    n = int(n)
    _check_odd(n)
    target = 4 * n - 2
    pairs = []
    alpha = 0
    while 2 * alpha * alpha <= target:
        beta = math.isqrt(target - alpha * alpha)
        if beta * beta == target - alpha * alpha:
            pairs.append((alpha, beta))
        alpha += 1
    return pairs


def dopt_spec(n: int, alpha: int, beta: int) -> DesignSpec:
    """D-optimal design of circulant type: ``a * a + b * b = (2n, 2, ..., 2)``."""
    n, alpha, beta = int(n), int(alpha), int(beta)
    _check_odd(n)
    if alpha * alpha + beta * beta != 4 * n - 2:
        raise InvalidSpecError(
            f"row sums ({alpha}, {beta}) violate alpha^2 + beta^2 = 4n - 2 = {4 * n - 2}"
        )
    v = (2 * n,) + (2,) * (n - 1)
    return DesignSpec("dopt", n, 2, AlphabetSpec.uniform((-1, 1), 2, n), (alpha, beta), v)


def dcc_spec(n: int, s1: int = 1, s2: int = 1) -> DesignSpec:
    """Two circulant cores of a Hadamard matrix: ``a * a + b * b = (2n, -2, ..., -2)``."""
    n = int(n)
    _check_odd(n)
    alpha = (_check_sign("s1", s1), _check_sign("s2", s2))
    v = (2 * n,) + (-2,) * (n - 1)
    return DesignSpec("dcc", n, 2, AlphabetSpec.uniform((-1, 1), 2, n), alpha, v)


def custom_spec(
    n: int,
    alphabet: AlphabetSpec | Sequence[float],
    alpha: Sequence[int],
    v: Sequence[int],
) -> DesignSpec:
    """Arbitrary design parameters; validated with :func:`validate`."""
    alpha = tuple(int(a) for a in alpha)
    v = tuple(int(x) for x in v)
    if len(v) != n:
        raise InvalidSpecError(f"v must have length n = {n}, got {len(v)}")
    if not isinstance(alphabet, AlphabetSpec):
        alphabet = AlphabetSpec.uniform(alphabet, len(alpha), n)
    if alphabet.shape != (len(alpha), n):
        raise InvalidSpecError(
            f"alphabet shape {alphabet.shape} does not match (m, n) = {(len(alpha), n)}"
        )
    spec = DesignSpec("custom", int(n), len(alpha), alphabet, alpha, v)
    validate(spec)
    return spec


def spec_for(family: str, n: int, *, k=None, alpha=None, beta=None, sign: int = 1) -> DesignSpec:
    """Build a family spec from loosely typed (CLI/record) parameters.

    For ``dopt`` without row sums the first solution of the Diophantine
    equation is used.  ``sign`` is the CW row-sum sign.
    """
    if family == "cw":
        if k is None:
            raise InvalidSpecError("cw needs k")
        return cw_spec(n, k, sign)
    if family == "dopt":
        if alpha is None and beta is None:
            pairs = dopt_row_sums(n)
            if not pairs:
                raise InvalidSpecError(f"no row sums with alpha^2 + beta^2 = {4 * n - 2}")
            alpha, beta = pairs[0]
        if alpha is None or beta is None:
            raise InvalidSpecError("dopt needs both alpha and beta")
        return dopt_spec(n, alpha, beta)
    if family == "dcc":
        return dcc_spec(n, 1 if alpha is None else alpha, 1 if beta is None else beta)
    raise InvalidSpecError(f"unknown family {family!r}; expected one of cw, dopt, dcc")


def validate(spec: DesignSpec) -> None:
    """Raise :class:`InvalidSpecError` unless ``spec`` passes the necessary conditions.

    Checks shapes, the power-sum condition ``sum alpha_j^2 == sum_s v_s``
    (for a constant tail this is ``nu1 (n - 1) + nu0``) and that the target
    power spectrum is real and nonnegative.
    """
    n, m = spec.n, spec.m
    if len(spec.alpha) != m or len(spec.v) != n or spec.alphabet.shape != (m, n):
        raise InvalidSpecError("inconsistent shapes in design spec")
    tail = set(spec.v[1:])
    if len(tail) <= 1:
        nu1 = tail.pop() if tail else 0
        ok = check_power_sum_condition(spec.alpha, spec.v[0], nu1, n)
    else:
        ok = sum(a * a for a in spec.alpha) == sum(spec.v)
    if not ok:
        raise InvalidSpecError(
            f"row sums {spec.alpha} fail the power-sum condition for v = {spec.v[:3]}..."
        )
    try:
        target_spectrum(spec.v)
    except (InfeasibleSpectrumError, SymmetryError) as exc:
        raise InvalidSpecError(str(exc)) from exc


@dataclass(frozen=True)
class Verification:
    """Outcome of an exact check; truthy iff it passed."""

    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def to_int_ensemble(e) -> np.ndarray | None:
    """Exact int64 copy of ``e`` as an ``(m, n)`` array, or ``None`` if an entry is not integral."""
    arr = np.asarray(e)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.dtype.kind in "iub":
        return arr.astype(np.int64)
    if arr.dtype.kind != "f" or not np.all(np.isfinite(arr)):
        return None
    rounded = np.round(arr)
    if not np.array_equal(rounded, arr):
        return None
    return rounded.astype(np.int64)


def verify_exact(spec: DesignSpec, e) -> Verification:
    """Check alphabet, row sums and autocorrelation sum exactly.

    The diagnostic names the first violated condition, in the order shape,
    integrality, alphabet, row sums, autocorrelation.
    """
    ints = to_int_ensemble(e)
    if ints is None:
        return Verification(False, "entries are not all integers")
    if ints.shape != (spec.m, spec.n):
        return Verification(False, f"shape {ints.shape} != {(spec.m, spec.n)}")
    if not spec.alphabet.contains(ints):
        return Verification(False, "alphabet: an entry lies outside its alphabet")
    sums = ints.sum(axis=1)
    for j, (got, want) in enumerate(zip(sums.tolist(), spec.alpha)):
        if got != want:
            return Verification(False, f"row sum: member {j} sums to {got}, expected {want}")
    v = spec.v
    for s in range(spec.n):
        total = 0
        for member in ints:
            total += int(np.dot(member, np.roll(member, -s)))
        if total != v[s]:
            return Verification(
                False, f"autocorrelation: lag {s} sums to {total}, expected {v[s]}"
            )
    return Verification(True)


def verify_cw(a, k: int) -> Verification:
    """True iff ``a`` is the first row of a CW(n, k^2), with either row-sum sign."""
    ints = to_int_ensemble(a)
    if ints is None or ints.shape[0] != 1:
        return Verification(False, "expected a single integer sequence")
    n = ints.shape[1]
    try:
        spec = cw_spec(n, k, -1 if ints.sum() < 0 else 1)
    except InvalidSpecError as exc:
        return Verification(False, str(exc))
    return verify_exact(spec, ints)


def circulant(a) -> np.ndarray:
    """Circulant matrix whose row ``i`` is ``a`` cyclically shifted right by ``i``."""
    a = np.asarray(a)
    if a.ndim != 1:
        raise ValueError("circulant needs a one-dimensional first row")
    return np.stack([np.roll(a, i) for i in range(a.size)])


def _require(spec: DesignSpec, a, b) -> tuple[np.ndarray, np.ndarray]:
    check = verify_exact(spec, [a, b])
    if not check:
        raise UnverifiedDesignError(f"not a {spec.family} design: {check.reason}")
    ints = to_int_ensemble([a, b])
    return ints[0], ints[1]


def build_dopt_matrix(a, b) -> np.ndarray:
    """D-optimal matrix ``[[A, B], [-B^T, A^T]]`` of order 2n from a verified pair."""
    a = np.asarray(a)
    b = np.asarray(b)
    n = a.size
    sa, sb = int(np.sum(a)), int(np.sum(b))
    try:
        spec = dopt_spec(n, sa, sb)
    except InvalidSpecError as exc:
        raise UnverifiedDesignError(str(exc)) from exc
    a, b = _require(spec, a, b)
    A, B = circulant(a), circulant(b)
    return np.block([[A, B], [-B.T, A.T]])


def build_dcc_hadamard(a, b) -> np.ndarray:
    """Bordered Hadamard matrix of order 2n + 2 with circulant cores ``c(a)``, ``c(b)``.

    Either member may have row sum -1; it is negated first, which keeps its
    autocorrelation and brings the pair to the row sums (1, 1) the border needs.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    n = a.size
    sa, sb = int(np.sum(a)), int(np.sum(b))
    if sa not in (1, -1) or sb not in (1, -1):
        raise UnverifiedDesignError(f"row sums ({sa}, {sb}) must be +-1")
    a, b = _require(dcc_spec(n, sa, sb), a, b)
    a, b = sa * a, sb * b
    A, B = circulant(a), circulant(b)
    ones = np.ones(n, dtype=np.int64)
    top = np.array(
        [np.concatenate(([-1, -1], ones, ones)), np.concatenate(([-1, 1], ones, -ones))]
    )
    col_a = np.tile([1, 1], (n, 1))
    col_b = np.tile([1, -1], (n, 1))
    middle = np.hstack([col_a, A, B])
    bottom = np.hstack([col_b, B.T, -A.T])
    return np.vstack([top, middle, bottom]).astype(np.int64)


def exact_determinant(M) -> int:
    """Determinant of an integer matrix by Bareiss fraction-free elimination."""
    rows = [[int(x) for x in row] for row in np.asarray(M).tolist()]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for i in range(n - 1):
        if rows[i][i] == 0:
            swap = next((r for r in range(i + 1, n) if rows[r][i] != 0), None)
            if swap is None:
                return 0
            rows[i], rows[swap] = rows[swap], rows[i]
            sign = -sign
        pivot = rows[i][i]
        for r in range(i + 1, n):
            ri = rows[r][i]
            row_r, row_i = rows[r], rows[i]
            for c in range(i + 1, n):
                row_r[c] = (row_r[c] * pivot - ri * row_i[c]) // prev
            row_r[i] = 0
        prev = pivot
    return sign * rows[n - 1][n - 1]


def ehlich_bound(n: int) -> int:
    """Maximal |det| of a {+-1} matrix of order 2n, n odd: ``2^n (2n-1) (n-1)^(n-1)``."""
    return 2**n * (2 * n - 1) * (n - 1) ** (n - 1)
