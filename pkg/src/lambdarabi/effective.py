"""Adiabatic elimination of state 2 and the effective 1-3 two-state system.

With ``b1 = u exp(i theta)`` and ``b3 = v exp(-i phi)`` the slow amplitudes
obey ``i u' = -S v``, ``i v' = -conj(S) u``.  The coupling ``S`` can be
evaluated exactly, as a truncated Fourier-Bessel sum, or reduced to its
slowly varying resonant harmonic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from lambdarabi.errors import DomainError, IntegratorError
from lambdarabi.model import (Carrier, PulseEnvelope, SystemParams, detect_resonance,
                              envelope_value, instantaneous_rabi, phase_table,
                              static_stark_shift)
from lambdarabi.specfn import jn
from lambdarabi.timegrid import TimeGrid, TimeSeries, cycles_to_tau, tau_to_cycles

NORM_FAIL = 1e-6


def adiabatic_b2(params: SystemParams, env: PulseEnvelope, b1, b3, t):
    """Leading adiabatic value of the intermediate amplitude."""
    w, m = instantaneous_rabi(params, env, t)
    return (w * np.asarray(b1) + m * np.asarray(b3)) / params.normalized().omega21


@dataclass(frozen=True)
class Exact:
    """``S = Omega M / omega21 * exp(-i alpha)``.

    ``alpha`` is the slowly-varying-envelope form unless ``exact_phase``.
    """

    exact_phase: bool = False


@dataclass(frozen=True)
class BesselTruncated:
    """Fourier-Bessel sum over ``|n| <= n_max`` (default ``|P|/2 + 6``)."""

    n_max: int | None = None


@dataclass(frozen=True)
class SlowOnly:
    """Resonant harmonic only: ``S = Omega^(P)``, optionally ``* exp(-i Delta_t)``.

    ``rabi_form`` is ``"general"`` (exact Bessel factor) or ``"smallz"``.
    """

    P: int
    with_phase_factor: bool = False
    rabi_form: str = "general"

    def __post_init__(self):
        if self.P % 2:
            raise DomainError(f"resonance order must be even, got {self.P}")
        if self.rabi_form not in ("general", "smallz"):
            raise DomainError(f"unknown rabi_form {self.rabi_form!r}")


CouplingMode = Exact | BesselTruncated | SlowOnly


def _carrier_sign(p: SystemParams, n: int) -> float:
    if p.carrier is Carrier.SINE:
        return 1.0
    return -1.0 if n % 2 else 1.0


def _harmonic(p: SystemParams, f2, n: int):
    """``S_n`` amplitude of harmonic ``n`` with the ``1/f^2`` factor cancelled.

    Uses ``(1 - n/z) J_n(z) = J_n(z) - (J_{n-1}(z) + J_{n+1}(z)) / 2``.
    """
    z = 0.5 * static_stark_shift(p) * f2
    core = jn(n, z) - 0.5 * (jn(n - 1, z) + jn(n + 1, z))
    return _carrier_sign(p, n) * p.rabi_omega * p.rabi_m / (2.0 * p.omega21) * f2 * core


def slow_rabi_general(params: SystemParams, env: PulseEnvelope, t, P: int):
    """Resonant multiphoton Rabi frequency with the full Bessel factor."""
    if P % 2:
        raise DomainError(f"resonance order must be even, got {P}")
    p = params.normalized()
    f = envelope_value(env, t)
    return _harmonic(p, np.asarray(f) ** 2, P // 2)


def _smallz(p: SystemParams, f2, P: int):
    if P < 0 or P % 2:
        raise DomainError(f"small-z Rabi form needs even P >= 0, got {P}")
    delta = static_stark_shift(p)
    f2 = np.asarray(f2, dtype=float)
    if np.any(np.abs(0.5 * delta * f2) > 0.5):
        raise DomainError("small-z Rabi form needs |Delta f^2 / 2 omega0| <= 0.5")
    base = p.rabi_omega * p.rabi_m / (2.0 * p.omega21) * f2
    if P == 0:
        return base
    q = P // 2 - 1
    sign = (-1.0) ** q if p.carrier is Carrier.COSINE else -1.0
    return sign * base * (0.25 * delta * f2) ** q / (2.0 * math.factorial(q))


def slow_rabi_smallz(params: SystemParams, env: PulseEnvelope, t, P: int):
    """Leading small-argument form of the resonant Rabi frequency."""
    return _smallz(params.normalized(), np.asarray(envelope_value(env, t)) ** 2, P)


def slow_rabi(params: SystemParams, f2, P: int, rabi_form: str = "general"):
    """Resonant Rabi frequency from tabulated ``f^2`` values."""
    p = params.normalized()
    if rabi_form == "smallz":
        return _smallz(p, f2, P)
    return _harmonic(p, np.asarray(f2, dtype=float), P // 2)


def default_n_max(params: SystemParams) -> int:
    return abs(detect_resonance(params).order_p) // 2 + 6


def coupling_series(params: SystemParams, env: PulseEnvelope, grid: TimeGrid, mode):
    """Complex coupling ``S`` on the half-step nodes of ``grid``."""
    p = params.normalized()
    # full nodes of the refined grid are the half nodes of ``grid``
    table = phase_table(p, env, grid.refined(2))
    tau = table.tau
    f = env.value(tau_to_cycles(tau))
    f2 = f * f
    if isinstance(mode, Exact):
        c = p.carrier(tau)
        alpha = table.alpha_exact if mode.exact_phase else table.alpha_approx
        return p.rabi_omega * p.rabi_m / p.omega21 * f2 * c * c * np.exp(-1j * alpha)
    if isinstance(mode, BesselTruncated):
        n_max = default_n_max(p) if mode.n_max is None else mode.n_max
        need = abs(detect_resonance(p).order_p) // 2 + 2
        if n_max < need:
            raise DomainError(f"n_max = {n_max} is too small; need at least {need}")
        base = np.exp(-1j * (p.omega31 * tau + table.stark_phase))
        total = np.zeros_like(base)
        for n in range(-n_max, n_max + 1):
            total += _harmonic(p, f2, n) * np.exp(2j * n * tau)
        return total * base
    if isinstance(mode, SlowOnly):
        s = slow_rabi(p, f2, mode.P, mode.rabi_form).astype(complex)
        if mode.with_phase_factor:
            s = s * np.exp(-1j * table.stark_phase)
        return s
    raise TypeError(f"unknown coupling mode {mode!r}")


def coupling_s(params: SystemParams, env: PulseEnvelope, t: float, mode,
               steps_per_cycle: int = 1600) -> complex:
    """Coupling ``S`` at a single time ``t`` (cycles)."""
    t = float(t)
    if t < 0:
        raise DomainError(f"negative time {t}")
    if t == 0:
        return 0j
    return complex(coupling_series(params, env, TimeGrid(t, steps_per_cycle, 1), mode)[-1])


def _rk4_two_state(s, h, n_steps, stride):
    # u' = i S v ; v' = i conj(S) u
    u, v = 1.0 + 0j, 0j
    I = 1j
    out = np.empty((n_steps // stride + 1, 2), dtype=complex)
    out[0] = (u, v)
    hh, h6 = 0.5 * h, h / 6.0
    k = 1
    for n in range(n_steps):
        j = 2 * n
        s0, s1, s2 = s[j], s[j + 1], s[j + 2]
        c0, c1, c2 = s0.conjugate(), s1.conjugate(), s2.conjugate()
        k1u, k1v = I * s0 * v, I * c0 * u
        yu, yv = u + hh * k1u, v + hh * k1v
        k2u, k2v = I * s1 * yv, I * c1 * yu
        yu, yv = u + hh * k2u, v + hh * k2v
        k3u, k3v = I * s1 * yv, I * c1 * yu
        yu, yv = u + h * k3u, v + h * k3v
        k4u, k4v = I * s2 * yv, I * c2 * yu
        u += h6 * (k1u + 2.0 * (k2u + k3u) + k4u)
        v += h6 * (k1v + 2.0 * (k2v + k3v) + k4v)
        if (n + 1) % stride == 0:
            out[k] = (u, v)
            k += 1
    return out


def integrate_two_state(params: SystemParams, env: PulseEnvelope, t_end: float,
                        steps_per_cycle: int = 1600, mode=None,
                        samples_per_cycle: int = 20) -> TimeSeries:
    """Integrate the effective ``(u, v)`` system from ``(1, 0)``.

    The returned series also carries ``b1 = u e^{i theta}``,
    ``b3 = v e^{-i phi}`` with the oscillatory Stark phases.
    """
    if steps_per_cycle < 100:
        raise ValueError("steps_per_cycle must be at least 100")
    p = params.normalized()
    mode = Exact() if mode is None else mode
    grid = TimeGrid(t_end, steps_per_cycle, samples_per_cycle)
    s = coupling_series(p, env, grid, mode)
    out = _rk4_two_state(s.tolist(), grid.h, grid.n_steps, grid.stride)
    drift = float(np.max(np.abs(np.sum(np.abs(out) ** 2, axis=1) - 1.0)))
    if drift > NORM_FAIL:
        raise IntegratorError(f"two-state norm drift {drift:.3e} exceeds {NORM_FAIL:g}",
                              norm_drift=drift)
    table = phase_table(p, env, grid)
    idx = grid.sample_index
    u, v = out[:, 0], out[:, 1]
    b1 = u * np.exp(1j * table.theta[idx])
    b3 = v * np.exp(-1j * table.phi[idx])
    return TimeSeries(grid.t_samples, {"u": u, "v": v, "b1": b1, "b3": b3},
                      steps_per_cycle, {"norm_drift": drift, "solver": "two_state",
                                        "mode": repr(mode)})


def with_adiabatic_b2(traj: TimeSeries, params: SystemParams, env: PulseEnvelope) -> TimeSeries:
    """Copy of ``traj`` with ``b2`` filled in from the adiabatic formula."""
    data = dict(traj.data)
    data["b2"] = adiabatic_b2(params, env, traj["b1"], traj["b3"], traj.t)
    order = {k: data[k] for k in ("b1", "b2", "b3")}
    order.update({k: v for k, v in data.items() if k not in order})
    return TimeSeries(traj.t, order, traj.steps_per_cycle, dict(traj.meta))
