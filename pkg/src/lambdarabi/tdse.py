"""Reference dynamics: the full three-amplitude equations and the ratio form.

Both integrators use classical fixed-step RK4 with the forcing tabulated on
the half-step nodes, so they see identical field samples and can be
compared point by point.  The norm is monitored, never renormalised.
"""

from __future__ import annotations

import logging
import warnings

import numpy as np

from lambdarabi.errors import IntegratorError, SingularityError
from lambdarabi.model import PulseEnvelope, SystemParams, forcing
from lambdarabi.timegrid import TimeGrid, TimeSeries

log = logging.getLogger(__name__)

NORM_WARN = 1e-8
NORM_FAIL = 1e-6
HALVING_TOL = 1e-6


def norm(state) -> float:
    """Total population of an amplitude triple (or any amplitude sequence)."""
    return float(sum(abs(b) ** 2 for b in state))


def _rk4_full(omega, m, w21, w31, h, n_steps, stride):
    # i b1' = -W b2 ; i b2' = w21 b2 - W b1 - M b3 ; i b3' = w31 b3 - M b2
    b1, b2, b3 = 1.0 + 0j, 0j, 0j
    I = 1j
    n_out = n_steps // stride + 1
    out = np.empty((n_out, 3), dtype=complex)
    out[0] = (b1, b2, b3)
    hh = 0.5 * h
    h6 = h / 6.0
    k = 1
    for s in range(n_steps):
        j = 2 * s
        W0, W1, W2 = omega[j], omega[j + 1], omega[j + 2]
        M0, M1, M2 = m[j], m[j + 1], m[j + 2]

        k11 = I * W0 * b2
        k12 = -I * (w21 * b2 - W0 * b1 - M0 * b3)
        k13 = -I * (w31 * b3 - M0 * b2)

        y1, y2, y3 = b1 + hh * k11, b2 + hh * k12, b3 + hh * k13
        k21 = I * W1 * y2
        k22 = -I * (w21 * y2 - W1 * y1 - M1 * y3)
        k23 = -I * (w31 * y3 - M1 * y2)

        y1, y2, y3 = b1 + hh * k21, b2 + hh * k22, b3 + hh * k23
        k31 = I * W1 * y2
        k32 = -I * (w21 * y2 - W1 * y1 - M1 * y3)
        k33 = -I * (w31 * y3 - M1 * y2)

        y1, y2, y3 = b1 + h * k31, b2 + h * k32, b3 + h * k33
        k41 = I * W2 * y2
        k42 = -I * (w21 * y2 - W2 * y1 - M2 * y3)
        k43 = -I * (w31 * y3 - M2 * y2)

        b1 += h6 * (k11 + 2.0 * (k21 + k31) + k41)
        b2 += h6 * (k12 + 2.0 * (k22 + k32) + k42)
        b3 += h6 * (k13 + 2.0 * (k23 + k33) + k43)
        if (s + 1) % stride == 0:
            out[k] = (b1, b2, b3)
            k += 1
    return out, (b1, b2, b3)


def _full_run(params: SystemParams, env: PulseEnvelope, grid: TimeGrid):
    p = params.normalized()
    f, c = forcing(p, env, grid)
    field = f * c
    omega = (p.rabi_omega * field).tolist()
    m = (p.rabi_m * field).tolist()
    return _rk4_full(omega, m, p.omega21, p.omega31, grid.h, grid.n_steps, grid.stride)


def integrate_full(params: SystemParams, env: PulseEnvelope, t_end: float,
                   steps_per_cycle: int = 1600, samples_per_cycle: int = 20,
                   verify: bool = True) -> TimeSeries:
    """Integrate the three-level amplitude equations from ``(1, 0, 0)``.

    Parameters
    ----------
    t_end : float
        Duration in optical cycles.
    steps_per_cycle : int
        RK4 steps per cycle (>= 100).  The default keeps the norm drift of
        the built-in scenarios below 1e-8.
    samples_per_cycle : int
        Recorded samples per cycle; must divide ``steps_per_cycle``.
    verify : bool
        Repeat the run at half the step and record the change of the final
        ``|b3|^2`` in ``meta["halving_delta"]``.

    Raises
    ------
    IntegratorError
        If the norm drifts by more than 1e-6.
    """
    if steps_per_cycle < 100:
        raise ValueError("steps_per_cycle must be at least 100")
    grid = TimeGrid(t_end, steps_per_cycle, samples_per_cycle)
    out, _ = _full_run(params, env, grid)
    drift = float(np.max(np.abs(np.sum(np.abs(out) ** 2, axis=1) - 1.0)))
    if drift > NORM_FAIL:
        raise IntegratorError(
            f"norm drift {drift:.3e} exceeds {NORM_FAIL:g}; increase steps_per_cycle",
            norm_drift=drift, steps_per_cycle=steps_per_cycle)
    if drift > NORM_WARN:
        warnings.warn(f"norm drift {drift:.3e} above {NORM_WARN:g}", stacklevel=2)
    meta = {"norm_drift": drift, "solver": "full"}
    if verify:
        _, last = _full_run(params, env, grid.refined(2))
        delta = abs(abs(last[2]) ** 2 - abs(out[-1, 2]) ** 2)
        meta["halving_delta"] = delta
        if delta > HALVING_TOL:
            warnings.warn(f"step halving changed final |b3|^2 by {delta:.2e}",
                          stacklevel=2)
    log.debug("integrate_full: %d steps, drift %.2e", grid.n_steps, drift)
    return TimeSeries(grid.t_samples, {"b1": out[:, 0], "b2": out[:, 1], "b3": out[:, 2]},
                      steps_per_cycle, meta)


def _rk4_ratios(omega, m, w21, w31, h, n_steps, stride, blowup):
    # i r' = (r^2 - 1) W + w21 r - M rho ; i rho' = (w31 + W r) rho - M r
    r, q = 0j, 0j
    I = 1j
    n_out = n_steps // stride + 1
    out = np.full((n_out, 2), np.nan + 0j, dtype=complex)
    out[0] = (r, q)
    hh = 0.5 * h
    h6 = h / 6.0
    k = 1
    for s in range(n_steps):
        j = 2 * s
        W0, W1, W2 = omega[j], omega[j + 1], omega[j + 2]
        M0, M1, M2 = m[j], m[j + 1], m[j + 2]

        k1r = -I * ((r * r - 1.0) * W0 + w21 * r - M0 * q)
        k1q = -I * ((w31 + W0 * r) * q - M0 * r)
        yr, yq = r + hh * k1r, q + hh * k1q
        k2r = -I * ((yr * yr - 1.0) * W1 + w21 * yr - M1 * yq)
        k2q = -I * ((w31 + W1 * yr) * yq - M1 * yr)
        yr, yq = r + hh * k2r, q + hh * k2q
        k3r = -I * ((yr * yr - 1.0) * W1 + w21 * yr - M1 * yq)
        k3q = -I * ((w31 + W1 * yr) * yq - M1 * yr)
        yr, yq = r + h * k3r, q + h * k3q
        k4r = -I * ((yr * yr - 1.0) * W2 + w21 * yr - M2 * yq)
        k4q = -I * ((w31 + W2 * yr) * yq - M2 * yr)

        r += h6 * (k1r + 2.0 * (k2r + k3r) + k4r)
        q += h6 * (k1q + 2.0 * (k2q + k3q) + k4q)
        if not (abs(r) < blowup and abs(q) < blowup):
            return out, s + 1
        if (s + 1) % stride == 0:
            out[k] = (r, q)
            k += 1
    return out, None


def integrate_ratios(params: SystemParams, env: PulseEnvelope, t_end: float,
                     steps_per_cycle: int = 1600, samples_per_cycle: int = 20,
                     blowup: float = 1e3, truncate: bool = False) -> TimeSeries:
    """Integrate the nonlinear equations for ``r = b2/b1`` and ``rho = b3/b1``.

    The ratios diverge wherever ``b1`` vanishes.  When ``|r|`` or ``|rho|``
    reaches ``blowup`` a :class:`SingularityError` is raised, unless
    ``truncate`` is set, in which case the series ends at the last sample
    before the blow-up and ``meta["blowup_time"]`` records when it happened.
    """
    if steps_per_cycle < 100:
        raise ValueError("steps_per_cycle must be at least 100")
    p = params.normalized()
    grid = TimeGrid(t_end, steps_per_cycle, samples_per_cycle)
    f, c = forcing(p, env, grid)
    field = f * c
    out, hit = _rk4_ratios((p.rabi_omega * field).tolist(), (p.rabi_m * field).tolist(),
                           p.omega21, p.omega31, grid.h, grid.n_steps, grid.stride, blowup)
    t = grid.t_samples
    meta = {"solver": "ratios", "blowup_time": None}
    if hit is not None:
        t_hit = hit / steps_per_cycle * (grid.t_end * steps_per_cycle / grid.n_steps)
        if not truncate:
            raise SingularityError(
                f"ratio variables exceeded {blowup:g} at t = {t_hit:.4f} cycles "
                "(b1 close to zero)", blowup_time=t_hit)
        meta["blowup_time"] = t_hit
        keep = hit // grid.stride + 1
        t, out = t[:keep], out[:keep]
    return TimeSeries(t, {"r": out[:, 0], "rho": out[:, 1]}, steps_per_cycle, meta)
