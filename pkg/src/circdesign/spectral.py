"""Unitary DFT helpers and the target spectrum of an autocorrelation constraint.

The transform uses the kernel ``omega = exp(+2 pi i / n)`` scaled by
``1/sqrt(n)``::

    dft(a)_k = n**-0.5 * sum_l a_l * omega**(k l)

which is numpy's ``ifft`` with ``norm="ortho"``.  numpy's pocketfft handles
every length (odd and prime lengths via Bluestein), so no power-of-two padding
is needed.

With this normalisation the correlation theorem reads
``|dft(a)|**2 == dft(a * a) / sqrt(n)``; the extra ``1/sqrt(n)`` is why
:func:`target_spectrum` divides the plain DFT of ``v`` by ``n``.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "TOL_SYM",
    "TOL_SPEC",
    "InfeasibleSpectrumError",
    "SymmetryError",
    "dft",
    "idft",
    "realify",
    "is_conjugate_symmetric",
    "target_spectrum",
]

TOL_SYM = 1e-9
TOL_SPEC = 1e-9


class SymmetryError(ValueError):
    """An inverse transform that should be real carries an imaginary residue."""


class InfeasibleSpectrumError(ValueError):
    """The target autocorrelation has a negative power spectrum value."""


def dft(a, axis: int = -1) -> np.ndarray:
    """Unitary DFT along ``axis``."""
    return np.fft.ifft(np.asarray(a), axis=axis, norm="ortho")


def idft(z, axis: int = -1) -> np.ndarray:
    """Inverse of :func:`dft`; returns a complex array."""
    return np.fft.fft(np.asarray(z), axis=axis, norm="ortho")


def realify(z, tol: float = TOL_SYM) -> np.ndarray:
    """Drop the imaginary part of ``z``, failing loudly if it exceeds ``tol``."""
    z = np.asarray(z)
    if np.iscomplexobj(z):
        residue = float(np.max(np.abs(z.imag), initial=0.0))
        if residue > tol:
            raise SymmetryError(f"imaginary residue {residue:.3e} exceeds {tol:.1e}")
        return z.real.copy()
    return z.astype(np.float64)


def is_conjugate_symmetric(z, tol: float = TOL_SYM) -> bool:
    """True if ``z_0`` is real and ``z_s == conj(z_{n-s})`` within ``tol``."""
    z = np.asarray(z, dtype=np.complex128)
    mirrored = np.conj(np.roll(z[::-1], 1))
    return bool(np.max(np.abs(z - mirrored)) <= tol)


def target_spectrum(v, tol_sym: float = TOL_SYM, tol_spec: float = TOL_SPEC) -> np.ndarray:
    """Power spectrum an ensemble must have for its autocorrelations to sum to ``v``.

    Returns ``tau`` with ``tau_s = (1/n) sum_l v_l omega**(s l)`` so that the
    constraint reads ``sum_j |dft(a^j)_s|**2 == tau_s``.  Values in
    ``(-tol_spec, 0)`` are clamped to zero.

    Raises
    ------
    SymmetryError
        If ``v`` is not symmetric (``v_s != v_{n-s}``), making ``tau`` complex.
    InfeasibleSpectrumError
        If some ``tau_s < -tol_spec``; no real ensemble can realise ``v``.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"v must be a nonempty 1-d sequence, got shape {v.shape}")
    tau = realify(np.fft.ifft(v), tol=tol_sym)  # ifft already carries the 1/n
    if np.any(tau < -tol_spec):
        worst = int(np.argmin(tau))
        raise InfeasibleSpectrumError(
            f"target spectrum is negative at frequency {worst}: {tau[worst]:.6g}"
        )
    tau[tau < 0] = 0.0
    return tau
