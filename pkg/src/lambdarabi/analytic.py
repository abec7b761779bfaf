"""Closed-form amplitudes: Riccati splitting, GRWA and Floquet reduction.

The ratio ``x = v/u`` of the effective amplitudes obeys
``i x' = S x^2 - conj(S)``.  It is approximated by ``x0 + x1`` with
``x0 = i tan(int S)`` and ``x1 = 2 int Im S``; in the GRWA limit ``S`` is real
and ``x0`` alone is exact.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from lambdarabi.effective import Exact, coupling_series, slow_rabi
from lambdarabi.errors import DomainError
from lambdarabi.model import (PulseEnvelope, SystemParams, detect_resonance,
                              phase_table, static_stark_shift)
from lambdarabi.timegrid import TimeGrid, TimeSeries, cycles_to_tau, tau_to_cycles

VALIDITY_FLAG = 0.1
APPLICABILITY_WARN = 0.1


class ApplicabilityWarning(UserWarning):
    """One of the GRWA smallness ratios is not small."""


@dataclass
class RiccatiSolution:
    t: np.ndarray
    x0: np.ndarray
    x1: np.ndarray
    x: np.ndarray
    beta: np.ndarray
    validity: np.ndarray
    int_s: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    steps_per_cycle: int
    flagged: np.ndarray = field(repr=False, default=None)
    singularity_times: list = field(default_factory=list)

    def __post_init__(self):
        if self.flagged is None:
            self.flagged = self.validity > VALIDITY_FLAG


def riccati_solve(params: SystemParams, env: PulseEnvelope, t_end: float,
                  steps_per_cycle: int = 1600, mode=None,
                  samples_per_cycle: int = 20) -> RiccatiSolution:
    """Approximate Riccati solution ``x = x0 + x1`` on a sampled grid.

    Samples where the validity measure ``|(x1^2 + 2 x0 x1) S|`` exceeds 0.1
    are flagged.  Times where ``cos(int S)`` passes through zero (complete
    1 -> 3 transfer, ``x0`` singular) are listed in ``singularity_times``.
    """
    p = params.normalized()
    mode = Exact() if mode is None else mode
    grid = TimeGrid(t_end, steps_per_cycle, samples_per_cycle)
    fine = grid.refined(2)
    s_fine = coupling_series(p, env, fine, mode)
    int_half = fine.cumulative(s_fine)          # on the half nodes of ``grid``
    s_half = s_fine[::2]
    x1_half = 2.0 * int_half.imag
    beta_full = np.exp(1j * grid.cumulative(s_half * x1_half))

    idx = grid.sample_index
    int_s = int_half[::2][idx]
    s_full = s_half[::2][idx]
    x1 = x1_half[::2][idx]
    cos_i = np.cos(int_s)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        x0 = 1j * np.tan(int_s)
    x = x0 + x1
    with np.errstate(invalid="ignore", over="ignore"):
        validity = np.abs((x1 * x1 + 2.0 * x0 * x1) * s_full)

    table = phase_table(p, env, grid)
    t = grid.t_samples
    mag = np.abs(cos_i)
    sing = [float(t[k]) for k in range(1, len(t) - 1)
            if mag[k] < 0.05 and mag[k] <= mag[k - 1] and mag[k] <= mag[k + 1]]
    return RiccatiSolution(t=t, x0=x0, x1=x1, x=x, beta=beta_full[idx], validity=validity,
                           int_s=int_s, theta=table.theta[idx], phi=table.phi[idx],
                           steps_per_cycle=steps_per_cycle, singularity_times=sing)


def amplitudes_from_riccati(sol: RiccatiSolution, params: SystemParams = None,
                            env: PulseEnvelope = None) -> TimeSeries:
    """Amplitudes ``(b1, b3)`` from a :class:`RiccatiSolution`.

    ``params`` and ``env`` are accepted for interface symmetry; the phases
    were already tabulated by :func:`riccati_solve`.
    """
    c, s = np.cos(sol.int_s), np.sin(sol.int_s)
    b1 = c * np.exp(1j * sol.theta) * sol.beta
    b3 = (1j * s + sol.x1 * c) * np.exp(-1j * sol.phi) * sol.beta
    return TimeSeries(sol.t, {"b1": b1, "b3": b3}, sol.steps_per_cycle,
                      {"solver": "riccati", "max_validity": float(np.nanmax(sol.validity))})


def integrate_riccati(params: SystemParams, env: PulseEnvelope, t_end: float,
                      steps_per_cycle: int = 1600, mode=None,
                      samples_per_cycle: int = 20) -> TimeSeries:
    """Direct RK4 integration of ``i x' = S x^2 - conj(S)`` from ``x = 0``.

    Reference for the ``x0 + x1`` splitting; diverges where ``u`` vanishes.
    """
    p = params.normalized()
    mode = Exact() if mode is None else mode
    grid = TimeGrid(t_end, steps_per_cycle, samples_per_cycle)
    s = coupling_series(p, env, grid, mode).tolist()
    h, hh, h6 = grid.h, 0.5 * grid.h, grid.h / 6.0
    x = 0j
    I = 1j
    out = np.full(grid.n_steps // grid.stride + 1, np.nan + 0j)
    out[0] = x
    k = 1
    for n in range(grid.n_steps):
        j = 2 * n
        s0, s1, s2 = s[j], s[j + 1], s[j + 2]
        k1 = -I * (s0 * x * x - s0.conjugate())
        y = x + hh * k1
        k2 = -I * (s1 * y * y - s1.conjugate())
        y = x + hh * k2
        k3 = -I * (s1 * y * y - s1.conjugate())
        y = x + h * k3
        k4 = -I * (s2 * y * y - s2.conjugate())
        x += h6 * (k1 + 2.0 * (k2 + k3) + k4)
        if not abs(x) < 1e8:
            break
        if (n + 1) % grid.stride == 0:
            out[k] = x
            k += 1
    return TimeSeries(grid.t_samples, {"x": out}, steps_per_cycle, {"solver": "riccati_ode"})


def applicability(params: SystemParams, env: PulseEnvelope, P: int, rabi_form="general",
                  t_end: float = None) -> dict:
    """The four GRWA smallness ratios, each of which should be << 1."""
    p = params.normalized()
    if t_end is None:
        f2max = 1.0
    else:
        t = np.linspace(0.0, t_end, 2001)
        f2max = float(np.max(env.value(t) ** 2))
    rabi = abs(float(slow_rabi(p, np.array([f2max]), P, rabi_form)[0]))
    return {
        "omega31/omega21": abs(p.omega31 / p.omega21),
        "(rabi_omega/omega21)^2": (p.rabi_omega / p.omega21) ** 2,
        "(rabi_m/omega21)^2": (p.rabi_m / p.omega21) ** 2,
        "rabi_P/omega21": rabi / p.omega21,
    }


def _check_applicability(params, env, P, rabi_form, t_end):
    if P < 0:
        warnings.warn("negative-P GRWA (omega31 < 0) is experimental",
                      ApplicabilityWarning, stacklevel=3)
    for name, value in applicability(params, env, P, rabi_form, t_end).items():
        if value > APPLICABILITY_WARN:
            warnings.warn(f"GRWA applicability: {name} = {value:.3g} is not << 1",
                          ApplicabilityWarning, stacklevel=3)


def _rabi_phase(p, env, grid, P, rabi_form):
    f2 = env.value(tau_to_cycles(grid.tau_half)) ** 2
    return grid.cumulative(slow_rabi(p, f2, P, rabi_form))


def grwa_series(params: SystemParams, env: PulseEnvelope, t_end: float, P: int = None,
                rabi_form: str = "general", steps_per_cycle: int = 1600,
                samples_per_cycle: int = 20, averaged_phases: bool = True,
                check: bool = True) -> TimeSeries:
    """GRWA amplitudes ``b1 = cos(A) e^{i theta}``, ``b3 = i sin(A) e^{-i phi}``.

    ``A`` is the running integral of the resonant Rabi frequency.  With
    ``averaged_phases`` the Stark phases use the cycle-averaged ``f^2/2``
    integrands; otherwise the fully oscillatory ones.
    """
    p = params.normalized()
    P = detect_resonance(p).order_p if P is None else P
    if P % 2:
        raise DomainError(f"resonance order must be even, got {P}")
    if check:
        _check_applicability(p, env, P, rabi_form, t_end)
    grid = TimeGrid(t_end, steps_per_cycle, samples_per_cycle)
    area = _rabi_phase(p, env, grid, P, rabi_form)
    table = phase_table(p, env, grid)
    if averaged_phases:
        theta, phi = table.theta_averaged(p), table.phi_averaged(p)
    else:
        theta, phi = table.theta, table.phi
    idx = grid.sample_index
    a = area[idx]
    b1 = np.cos(a) * np.exp(1j * theta[idx])
    b3 = 1j * np.sin(a) * np.exp(-1j * phi[idx])
    return TimeSeries(grid.t_samples, {"b1": b1, "b3": b3}, steps_per_cycle,
                      {"solver": "grwa", "P": P, "rabi_form": rabi_form})


def floquet_series(params: SystemParams, env: PulseEnvelope, t_end: float, P: int = None,
                   steps_per_cycle: int = 1600, samples_per_cycle: int = 20,
                   check: bool = True) -> TimeSeries:
    """Amplitudes from the two-state Floquet reduction (small-z Rabi form)."""
    p = params.normalized()
    P = detect_resonance(p).order_p if P is None else P
    if P < 0 or P % 2:
        raise DomainError(f"Floquet reduction needs even P >= 0, got {P}")
    if check:
        _check_applicability(p, env, P, "smallz", t_end)
    grid = TimeGrid(t_end, steps_per_cycle, samples_per_cycle)
    area = _rabi_phase(p, env, grid, P, "smallz")
    f2_int = grid.cumulative(env.value(tau_to_cycles(grid.tau_half)) ** 2)
    tau = grid.tau_full
    delta = static_stark_shift(p)
    idx = grid.sample_index
    a = area[idx]
    b1 = np.cos(a) * np.exp(1j * p.rabi_omega ** 2 / (2.0 * p.omega21) * f2_int[idx])
    b3_phase = delta * tau - P * tau + p.rabi_m ** 2 / (2.0 * p.omega21) * f2_int
    b3 = 1j * np.sin(a) * np.exp(1j * b3_phase[idx])
    return TimeSeries(grid.t_samples, {"b1": b1, "b3": b3}, steps_per_cycle,
                      {"solver": "floquet", "P": P})


def _at_times(series_fn, params, env, t, steps_per_cycle, **kw):
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise DomainError("negative time")
    t_max = float(t_arr.max())
    if t_max == 0:
        b1 = np.ones_like(t_arr, dtype=complex)
        b3 = np.zeros_like(t_arr, dtype=complex)
    else:
        ts = series_fn(params, env, t_max, steps_per_cycle=steps_per_cycle,
                       samples_per_cycle=steps_per_cycle, **kw)
        b1 = np.interp(t_arr, ts.t, ts["b1"].real) + 1j * np.interp(t_arr, ts.t, ts["b1"].imag)
        b3 = np.interp(t_arr, ts.t, ts["b3"].real) + 1j * np.interp(t_arr, ts.t, ts["b3"].imag)
    if np.ndim(t) == 0:
        return complex(b1[0]), complex(b3[0])
    return b1, b3


def grwa_amplitudes(params: SystemParams, env: PulseEnvelope, t, P: int = None,
                    rabi_form: str = "general", steps_per_cycle: int = 1600,
                    averaged_phases: bool = True):
    """GRWA ``(b1, b3)`` at time(s) ``t`` in cycles; see :func:`grwa_series`."""
    return _at_times(grwa_series, params, env, t, steps_per_cycle, P=P,
                     rabi_form=rabi_form, averaged_phases=averaged_phases)


def floquet_amplitudes(params: SystemParams, env: PulseEnvelope, t, P: int = None,
                       steps_per_cycle: int = 1600):
    """Floquet-reduction ``(b1, b3)`` at time(s) ``t`` in cycles."""
    return _at_times(floquet_series, params, env, t, steps_per_cycle, P=P)
