"""Nearest-point projectors for the three design constraints and the product space.

An ensemble is an ``(m, n)`` float array.  The three constraint sets are

* alphabet: every entry lies in its finite alphabet,
* row sums: member ``j`` sums to ``alpha[j]``,
* autocorrelation: the members' periodic autocorrelations sum to ``v``,

and the search runs in the product space of three copies of an ensemble,
stored as a ``(3, m, n)`` array.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from circdesign.spectral import TOL_SYM, dft, idft, realify

__all__ = [
    "TOL_ZERO",
    "AlphabetSpec",
    "Constraints",
    "project_alphabet",
    "project_rowsum",
    "project_autocorrelation",
    "project_C",
    "project_diagonal",
    "as_product_state",
]

TOL_ZERO = 1e-12


class AlphabetSpec:
    """Finite set of admissible values for every entry of an ``(m, n)`` ensemble.

    Most designs use one alphabet everywhere (see :meth:`uniform`); entries can
    also be pinned or restricted individually with :meth:`per_entry`.
    """

    def __init__(self, table: np.ndarray):
        # table[j, s, :] holds the sorted alphabet of entry (j, s), padded with +inf
        table = np.asarray(table, dtype=np.float64)
        if table.ndim != 3 or table.shape[2] == 0:
            raise ValueError("alphabet table must have shape (m, n, K) with K >= 1")
        if np.any(np.isnan(table)) or np.any(np.isinf(table[:, :, 0])):
            raise ValueError("every entry needs a nonempty finite alphabet")
        self._table = table
        first = table[0, 0][np.isfinite(table[0, 0])]
        self._global = first if np.all(table == table[0, 0]) else None

    @classmethod
    def uniform(cls, values: Iterable[float], m: int, n: int) -> "AlphabetSpec":
        vals = np.unique(np.asarray(list(values), dtype=np.float64))
        if vals.size == 0 or not np.all(np.isfinite(vals)):
            raise ValueError("alphabet must be a nonempty set of finite values")
        table = np.broadcast_to(vals, (m, n, vals.size)).copy()
        return cls(table)

    @classmethod
    def per_entry(cls, sets: Sequence[Sequence[Iterable[float]]]) -> "AlphabetSpec":
        """Build from ``sets[j][s]``, the admissible values of entry ``(j, s)``."""
        rows = [[np.unique(np.asarray(list(a), dtype=np.float64)) for a in member]
                for member in sets]
        n = len(rows[0])
        if any(len(member) != n for member in rows):
            raise ValueError("all members need the same number of entries")
        if any(a.size == 0 for member in rows for a in member):
            raise ValueError("every entry needs a nonempty alphabet")
        width = max(a.size for member in rows for a in member)
        table = np.full((len(rows), n, width), np.inf)
        for j, member in enumerate(rows):
            for s, a in enumerate(member):
                table[j, s, : a.size] = a
        return cls(table)

    @property
    def shape(self) -> tuple[int, int]:
        return self._table.shape[0], self._table.shape[1]

    @property
    def global_values(self) -> np.ndarray | None:
        """The common alphabet, or ``None`` when entries differ."""
        return None if self._global is None else self._global.copy()

    def values(self, j: int, s: int) -> np.ndarray:
        row = self._table[j, s]
        return row[np.isfinite(row)].copy()

    @property
    def all_values(self) -> np.ndarray:
        t = self._table
        return np.unique(t[np.isfinite(t)])

    @property
    def is_integral(self) -> bool:
        vals = self.all_values
        return bool(np.all(vals == np.round(vals)))

    def contains(self, e) -> bool:
        """Exact membership test of every entry in its alphabet."""
        e = np.asarray(e)
        if e.shape != self.shape:
            return False
        return bool(np.all(np.any(self._table == e[:, :, None], axis=2)))

    def nearest(self, e: np.ndarray) -> np.ndarray:
        if self._global is not None:
            vals = self._global
            idx = np.searchsorted(vals, e)
            lo = vals[np.clip(idx - 1, 0, vals.size - 1)]
            hi = vals[np.clip(idx, 0, vals.size - 1)]
            # ties resolve to the smaller value
            return np.where(np.abs(e - lo) <= np.abs(hi - e), lo, hi)
        dist = np.abs(self._table - e[:, :, None])
        pick = np.argmin(dist, axis=2)
        return np.take_along_axis(self._table, pick[:, :, None], axis=2)[:, :, 0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlphabetSpec):
            return NotImplemented
        return self._table.shape == other._table.shape and bool(
            np.array_equal(self._table, other._table)
        )

    def __hash__(self) -> int:
        return hash((self._table.shape, self._table.tobytes()))

    def __repr__(self) -> str:
        m, n = self.shape
        if self._global is not None:
            return f"AlphabetSpec.uniform({self._global.tolist()}, m={m}, n={n})"
        return f"AlphabetSpec(per-entry, m={m}, n={n})"


@dataclass(frozen=True, eq=False)
class Constraints:
    """Everything the projectors need: alphabet, row-sum targets, target spectrum."""

    alphabet: AlphabetSpec
    alpha: np.ndarray
    tau: np.ndarray
    tol_zero: float = TOL_ZERO
    tol_sym: float = TOL_SYM
    _sqrt_tau: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=np.float64)
        tau = np.asarray(self.tau, dtype=np.float64)
        m, n = self.alphabet.shape
        if alpha.shape != (m,):
            raise ValueError(f"alpha must have length {m}, got {alpha.shape}")
        if tau.shape != (n,):
            raise ValueError(f"tau must have length {n}, got {tau.shape}")
        if np.any(tau < 0):
            raise ValueError("tau must be nonnegative")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "_sqrt_tau", np.sqrt(tau))

    @property
    def shape(self) -> tuple[int, int]:
        return self.alphabet.shape


def _check_shape(e, shape) -> np.ndarray:
    e = np.asarray(e, dtype=np.float64)
    if e.ndim == 1:
        e = e[np.newaxis, :]
    if e.shape != tuple(shape):
        raise ValueError(f"ensemble shape {e.shape} does not match {tuple(shape)}")
    return e


def project_alphabet(e, alphabet: AlphabetSpec) -> np.ndarray:
    """Round every entry to a nearest value of its alphabet (ties go down)."""
    e = _check_shape(e, alphabet.shape)
    return alphabet.nearest(e)


def project_rowsum(e, alpha) -> np.ndarray:
    """Shift each member by a constant so that member ``j`` sums to ``alpha[j]``."""
    e = np.asarray(e, dtype=np.float64)
    if e.ndim == 1:
        e = e[np.newaxis, :]
    alpha = np.asarray(alpha, dtype=np.float64).reshape(-1)
    if alpha.shape != (e.shape[0],):
        raise ValueError(f"alpha must have length {e.shape[0]}, got {alpha.size}")
    n = e.shape[1]
    return e + ((alpha - e.sum(axis=1)) / n)[:, np.newaxis]


def project_autocorrelation(
    e, tau, tol_zero: float = TOL_ZERO, tol_sym: float = TOL_SYM
) -> np.ndarray:
    """Project onto ensembles whose power spectra sum to ``tau``.

    At every frequency the m-tuple of Fourier coefficients is rescaled jointly
    to norm ``sqrt(tau_s)``.  A tuple that is (numerically) zero has no unique
    nearest point; it is replaced by ``sqrt(tau_s)`` on member 0, which keeps
    the spectrum conjugate-symmetric.
    """
    e = np.asarray(e, dtype=np.float64)
    if e.ndim == 1:
        e = e[np.newaxis, :]
    tau = np.asarray(tau, dtype=np.float64)
    if tau.shape != (e.shape[1],):
        raise ValueError(f"tau must have length {e.shape[1]}, got {tau.shape}")
    return _project_autocorrelation(e, np.sqrt(tau), tol_zero, tol_sym)


def _project_autocorrelation(e, sqrt_tau, tol_zero, tol_sym) -> np.ndarray:
    z = dft(e, axis=1)
    rho = np.sqrt(np.sum(z.real**2 + z.imag**2, axis=0))
    live = rho > tol_zero
    # s and n-s must take the same branch or conjugate symmetry breaks
    live &= np.roll(live[::-1], 1)
    if live.all():
        z *= sqrt_tau / rho
    else:
        scale = np.where(live, sqrt_tau / np.where(live, rho, 1.0), 0.0)
        z *= scale
        dead = ~live
        z[0, dead] = sqrt_tau[dead]
    return realify(idft(z, axis=1), tol=tol_sym)


def as_product_state(x, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Validate a product-space point: a ``(3, m, n)`` float array."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3 or x.shape[0] != 3:
        raise ValueError(f"product state must have shape (3, m, n), got {x.shape}")
    if shape is not None and x.shape[1:] != tuple(shape):
        raise ValueError(f"blocks have shape {x.shape[1:]}, expected {tuple(shape)}")
    return x


def project_C(x, constraints: Constraints) -> np.ndarray:
    """Blockwise projection: block 0 onto the alphabet, 1 onto row sums, 2 onto the spectrum."""
    x = as_product_state(x, constraints.shape)
    out = np.empty_like(x)
    out[0] = constraints.alphabet.nearest(x[0])
    out[1] = x[1] + ((constraints.alpha - x[1].sum(axis=1)) / x.shape[2])[:, np.newaxis]
    out[2] = _project_autocorrelation(
        x[2], constraints._sqrt_tau, constraints.tol_zero, constraints.tol_sym
    )
    return out


def project_diagonal(x) -> np.ndarray:
    """Replace every block with the average of the blocks."""
    x = as_product_state(x)
    if np.array_equal(x[0], x[1]) and np.array_equal(x[0], x[2]):
        return x.copy()  # keeps the projector exactly idempotent
    return np.broadcast_to(x.mean(axis=0), x.shape).copy()
