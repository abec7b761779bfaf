"""Induced dipole and its finite-time (rectangular window) power spectrum."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lambdarabi.effective import adiabatic_b2
from lambdarabi.model import PulseEnvelope, SystemParams
from lambdarabi.timegrid import TWO_PI, TimeSeries

_CHUNK = 2_000_000


@dataclass
class DipoleSeries:
    t: np.ndarray
    d: np.ndarray


@dataclass
class SpectrumData:
    """Power on a frequency grid in omega0 units, normalised to max 1.

    ``raw_power`` keeps the unnormalised values.  ``window`` is the
    ``(t_start, t_end)`` span of the transform in cycles.
    """

    omega: np.ndarray
    power: np.ndarray
    raw_power: np.ndarray
    window: tuple

    def power_at(self, omega: float, half_width: float = 0.05) -> float:
        """Largest relative power within ``omega +- half_width``."""
        sel = np.abs(self.omega - omega) <= half_width
        return float(self.power[sel].max()) if np.any(sel) else 0.0


def induced_dipole(traj: TimeSeries, params: SystemParams,
                   env: PulseEnvelope | None = None) -> DipoleSeries:
    """``d = 2 w12 Re(b1* b2) + 2 w23 Re(b2* b3)`` with weights ``rabi_omega``, ``rabi_m``.

    Trajectories without ``b2`` (analytic ones) get the adiabatic value,
    which needs ``env``.
    """
    p = params.normalized()
    b1, b3 = traj["b1"], traj["b3"]
    if "b2" in traj:
        b2 = traj["b2"]
    else:
        if env is None:
            raise ValueError("trajectory has no b2; pass env to use the adiabatic value")
        b2 = adiabatic_b2(p, env, b1, b3, traj.t)
    d = (2.0 * p.rabi_omega * np.real(np.conj(b1) * b2)
         + 2.0 * p.rabi_m * np.real(np.conj(b2) * b3))
    return DipoleSeries(traj.t.copy(), d)


def required_samples_per_cycle(omega_max: float) -> float:
    # twice the Nyquist rate
    return 4.0 * omega_max


def coherent_spectrum(dip: DipoleSeries, omega_max: float = 8.0, resolution: int | None = None,
                      window: tuple | None = None, omega_min: float = 0.0) -> SpectrumData:
    """``|int d(t) exp(i omega t) dt|^2`` on ``[omega_min, omega_max]``.

    ``resolution`` is the number of grid points per omega0; by default four
    points per ``1/T`` of the window, enough to resolve each line's peak.
    The transform is evaluated directly (trapezoidal weights) on that grid.

    Raises
    ------
    ValueError
        If the dipole is sampled too coarsely for ``omega_max``.
    """
    t, d = np.asarray(dip.t), np.asarray(dip.d, dtype=float)
    if window is not None:
        sel = (t >= window[0] - 1e-12) & (t <= window[1] + 1e-12)
        t, d = t[sel], d[sel]
    if len(t) < 2:
        raise ValueError("need at least two dipole samples in the window")
    dt = t[1] - t[0]
    rate = 1.0 / dt
    need = required_samples_per_cycle(omega_max)
    if rate < need - 1e-9:
        raise ValueError(f"dipole sampled at {rate:g} samples/cycle; omega_max = "
                         f"{omega_max:g} needs at least {need:g}")
    if resolution is None:
        resolution = max(200, int(np.ceil(4.0 * (t[-1] - t[0]))))
    n_omega = int(round((omega_max - omega_min) * resolution)) + 1
    omega = np.linspace(omega_min, omega_max, n_omega)
    tau = TWO_PI * (t - t[0])
    w = np.full(len(t), TWO_PI * dt)
    w[0] = w[-1] = 0.5 * TWO_PI * dt
    wd = w * d
    amp = np.empty(n_omega, dtype=complex)
    step = max(1, _CHUNK // len(t))
    for i in range(0, n_omega, step):
        amp[i:i + step] = np.exp(1j * np.outer(omega[i:i + step], tau)) @ wd
    raw = np.abs(amp) ** 2
    peak = raw.max()
    power = raw / peak if peak > 0 else np.zeros_like(raw)
    return SpectrumData(omega, power, raw, (float(t[0]), float(t[-1])))


def find_peaks(spec: SpectrumData, min_relative_height: float = 1e-6,
               min_separation: float = 0.5) -> list[tuple[float, float]]:
    """Local maxima above ``min_relative_height``, greedily spaced by ``min_separation``.

    Sorted by descending power.
    """
    p = spec.power
    if len(p) < 3:
        return []
    inner = (p[1:-1] > p[:-2]) & (p[1:-1] >= p[2:]) & (p[1:-1] >= min_relative_height)
    cand = np.nonzero(inner)[0] + 1
    cand = cand[np.argsort(-p[cand], kind="stable")]
    kept = []
    for i in cand:
        w = spec.omega[i]
        if all(abs(w - k) >= min_separation for k, _ in kept):
            kept.append((float(w), float(p[i])))
    return kept
