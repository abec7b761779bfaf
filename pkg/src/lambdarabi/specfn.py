"""Integer-order Bessel functions of the first kind.

Power series for ``|z| < 1``, Miller backward recurrence normalised by
``J0 + 2 (J2 + J4 + ...) = 1`` otherwise.  Both paths work on numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from lambdarabi.errors import DomainError

_SERIES_TERMS = 24
_SERIES_RADIUS = 1.0


@dataclass(frozen=True)
class BesselResult:
    value: float
    est_abs_error: float


def _series(n: int, z: np.ndarray, terms: int = _SERIES_TERMS) -> np.ndarray:
    # sum_k (-1)^k (z/2)^(2k+n) / (k! (k+n)!), n >= 0
    half = 0.5 * z
    term = half ** n / math.factorial(n)
    total = term.copy()
    q = -half * half
    for k in range(1, terms):
        term = term * q / (k * (k + n))
        total += term
    return total


def _miller_start(n: int, zmax: float, extra: int = 0) -> int:
    m = max(n, int(zmax)) + 20 + int(math.sqrt(40.0 * max(n, zmax, 1.0))) + extra
    return m + (m % 2)


def _miller(n: int, z: np.ndarray, extra: int = 0) -> np.ndarray:
    # z must be non-zero; backward from an even order well above n and |z|
    m = _miller_start(n, float(np.max(np.abs(z))), extra)
    two_over_z = 2.0 / z
    j_next = np.zeros_like(z)
    j_cur = np.full_like(z, 1e-300)
    norm = np.zeros_like(z)
    picked = np.zeros_like(z)
    for k in range(m, 0, -1):
        j_prev = k * two_over_z * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        # j_cur now holds J_{k-1}
        if k - 1 == n:
            picked = j_cur.copy()
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_cur
        big = np.abs(j_cur) > 1e250
        if np.any(big):
            scale = np.where(big, 1e-250, 1.0)
            j_cur *= scale
            j_next *= scale
            norm *= scale
            picked *= scale
    norm += j_cur
    return picked / norm


def jn(n: int, z, extra: int = 0):
    """``J_n(z)`` for integer ``n`` and real ``z`` (scalar or array)."""
    n = int(n)
    z_arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z_arr)):
        raise DomainError("Bessel argument must be finite")
    sign = 1.0
    if n < 0:
        n = -n
        sign = -1.0 if n % 2 else 1.0
    zs = np.atleast_1d(z_arr)
    # parity J_n(-z) = (-1)^n J_n(z)
    parity = np.where((zs < 0) & (n % 2 == 1), -1.0, 1.0)
    a = np.abs(zs)
    out = np.empty_like(a)
    small = a < _SERIES_RADIUS
    if np.any(small):
        out[small] = _series(n, a[small], _SERIES_TERMS + extra)
    if np.any(~small):
        out[~small] = _miller(n, a[~small], extra)
    out *= sign * parity
    return float(out[0]) if z_arr.ndim == 0 else out


def bessel_j(n: int, z: float) -> BesselResult:
    """``J_n(z)`` with an error estimate from two truncation depths."""
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"Bessel argument must be finite, got {z}")
    value = jn(n, z)
    deeper = jn(n, z, extra=12)
    return BesselResult(value=deeper, est_abs_error=abs(deeper - value) + 2e-16 * abs(deeper))


def bessel_j_small(n: int, z):
    """Leading small-argument form ``(z/2)^n / n!``; requires ``|z| <= 0.5``."""
    if n < 0:
        raise DomainError("bessel_j_small takes non-negative orders")
    z_arr = np.asarray(z, dtype=float)
    if np.any(np.abs(z_arr) > 0.5) or not np.all(np.isfinite(z_arr)):
        raise DomainError(f"small-argument Bessel form needs |z| <= 0.5, got {z!r}")
    out = (0.5 * z_arr) ** n / math.factorial(n)
    return float(out) if z_arr.ndim == 0 else out
