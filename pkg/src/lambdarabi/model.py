"""Physical parameters, pulse envelopes, Stark phases and resonance order.

All frequencies are in units of the carrier frequency omega0; times at the
API boundary are in optical cycles ``T = 2 pi / omega0``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from lambdarabi.errors import DomainError, ValidationError
from lambdarabi.timegrid import TimeGrid, cycles_to_tau, tau_to_cycles


class Carrier(str, enum.Enum):
    COSINE = "cos"
    SINE = "sin"

    def __call__(self, tau):
        return np.cos(tau) if self is Carrier.COSINE else np.sin(tau)


@dataclass(frozen=True)
class SystemParams:
    """Level scheme and field strengths.

    ``omega21`` and ``omega31`` are the eigenfrequencies of states 2 and 3
    (state 1 sits at zero); ``rabi_omega`` and ``rabi_m`` are the peak
    one-photon Rabi frequencies on the 1-2 and 2-3 arms.  Frequencies may be
    given in any unit as long as ``omega0`` is in the same unit;
    :meth:`normalized` rescales so that ``omega0 == 1``.
    """

    omega21: float
    omega31: float
    rabi_omega: float
    rabi_m: float
    carrier: Carrier = Carrier.COSINE
    omega0: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "carrier", Carrier(self.carrier))
        if not self.omega0 > 0:
            raise ValidationError("params.omega0", "must be positive")
        for name in ("omega21", "omega31", "rabi_omega", "rabi_m"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"params.{name}", "must be finite")
        ratio = self.omega21 / self.omega0
        if ratio < 5:
            raise ValidationError(
                "params.omega21", f"omega21/omega0 = {ratio:g} < 5; the multiphoton "
                "regime needs omega21 >> omega0")
        if ratio < 10:
            warnings.warn(f"omega21/omega0 = {ratio:g} is below 10; adiabatic "
                          "elimination of state 2 is marginal", stacklevel=3)
        if abs(self.omega31) >= self.omega21:
            raise ValidationError("params.omega31", "|omega31| must be below omega21 "
                                  "(lambda configuration)")
        if self.rabi_omega < 0:
            raise ValidationError("params.rabi_omega", "must be non-negative")
        if self.rabi_m < 0:
            raise ValidationError("params.rabi_m", "must be non-negative")

    @property
    def omega23(self) -> float:
        return self.omega21 - self.omega31

    def normalized(self) -> "SystemParams":
        if self.omega0 == 1.0:
            return self
        s = 1.0 / self.omega0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return replace(self, omega21=self.omega21 * s, omega31=self.omega31 * s,
                           rabi_omega=self.rabi_omega * s, rabi_m=self.rabi_m * s,
                           omega0=1.0)


class PulseEnvelope:
    """Slowly varying field envelope ``f(t)`` with ``f(0) = 0``, ``0 <= f <= 1``."""

    def __call__(self, t_cycles):
        return self.value(t_cycles)

    def value(self, t_cycles):
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    @staticmethod
    def from_dict(d: dict) -> "PulseEnvelope":
        shape = d.get("shape")
        if shape == "sine_ramp_flat":
            return SineRampFlat(float(d["rise_cycles"]))
        if shape == "smooth_squared_exp":
            return SmoothSquaredExp(float(d["tau_cycles"]))
        raise ValidationError("envelope.shape", f"unknown envelope shape {shape!r}")


@dataclass(frozen=True)
class SineRampFlat(PulseEnvelope):
    """Quarter-sine rise over ``rise_cycles``, flat at 1 afterwards."""

    rise_cycles: float = 4.0

    def __post_init__(self):
        if not self.rise_cycles > 0:
            raise ValidationError("envelope.rise_cycles", "must be positive")

    def value(self, t_cycles):
        t = np.asarray(t_cycles, dtype=float)
        ramp = np.sin(0.5 * np.pi * np.minimum(t, self.rise_cycles) / self.rise_cycles)
        return np.where(t >= self.rise_cycles, 1.0, ramp)

    def to_dict(self):
        return {"shape": "sine_ramp_flat", "rise_cycles": self.rise_cycles}


@dataclass(frozen=True)
class SmoothSquaredExp(PulseEnvelope):
    """``(t/tau)^2 exp(1 - (t/tau)^2)``; peaks at exactly 1 when ``t = tau``."""

    tau_cycles: float = 100.0

    def __post_init__(self):
        if not self.tau_cycles > 0:
            raise ValidationError("envelope.tau_cycles", "must be positive")

    def value(self, t_cycles):
        x2 = (np.asarray(t_cycles, dtype=float) / self.tau_cycles) ** 2
        return x2 * np.exp(1.0 - x2)

    def to_dict(self):
        return {"shape": "smooth_squared_exp", "tau_cycles": self.tau_cycles}


def envelope_value(env: PulseEnvelope, t):
    """Envelope at time ``t`` (cycles); negative times are rejected."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or not np.all(np.isfinite(t_arr)):
        raise DomainError(f"envelope evaluated at negative or non-finite time {t!r}")
    out = env.value(t_arr)
    return float(out) if out.ndim == 0 else out


def instantaneous_rabi(params: SystemParams, env: PulseEnvelope, t):
    """Instantaneous Rabi frequencies ``(Omega(t), M(t))`` at ``t`` cycles."""
    p = params.normalized()
    field = envelope_value(env, t) * p.carrier(cycles_to_tau(t))
    return p.rabi_omega * field, p.rabi_m * field


def static_stark_shift(params: SystemParams) -> float:
    """Combined static Stark shift of the 1-3 transition, in omega0 units."""
    p = params.normalized()
    return (p.rabi_omega ** 2 - p.rabi_m ** 2) / (2.0 * p.omega21)


def forcing(params: SystemParams, env: PulseEnvelope, grid: TimeGrid):
    """Envelope and carrier on the half-step nodes of ``grid``.

    Returns ``(f, c)`` so that ``Omega = rabi_omega*f*c`` and ``M = rabi_m*f*c``.
    """
    tau = grid.tau_half
    return env.value(tau_to_cycles(tau)), params.normalized().carrier(tau)


@dataclass
class PhaseTable:
    """Stark phases on the full-step nodes of a grid (all in radians).

    ``f2_integral`` is the running integral of ``f^2`` over tau, so that the
    static shift phase ``Delta_t = stark * f2_integral``.
    """

    tau: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    stark_phase: np.ndarray
    alpha_exact: np.ndarray
    alpha_approx: np.ndarray
    f2_integral: np.ndarray
    quadrature_error: float

    def theta_averaged(self, params: SystemParams) -> np.ndarray:
        p = params.normalized()
        return p.rabi_omega ** 2 / (2.0 * p.omega21) * self.f2_integral

    def phi_averaged(self, params: SystemParams) -> np.ndarray:
        p = params.normalized()
        return p.omega31 * self.tau - p.rabi_m ** 2 / (2.0 * p.omega21) * self.f2_integral


def phase_table(params: SystemParams, env: PulseEnvelope, grid: TimeGrid) -> PhaseTable:
    """Cumulative Stark phases on every full step of ``grid``."""
    p = params.normalized()
    f, c = forcing(p, env, grid)
    f2 = f * f
    field2 = f2 * c * c
    theta = grid.cumulative(p.rabi_omega ** 2 / p.omega21 * field2)
    phi_integrand = p.omega31 - p.rabi_m ** 2 / p.omega21 * field2
    phi = grid.cumulative(phi_integrand)
    f2_int = grid.cumulative(f2)
    delta = static_stark_shift(p)
    tau = grid.tau_full
    f2_full = f2[::2]
    sign = 1.0 if p.carrier is Carrier.COSINE else -1.0
    alpha_approx = (p.omega31 * tau + delta * f2_int
                    + sign * 0.5 * delta * f2_full * np.sin(2.0 * tau))
    err = max(grid.cumulative_error(p.rabi_omega ** 2 / p.omega21 * field2),
              grid.cumulative_error(phi_integrand))
    return PhaseTable(tau=tau, theta=theta, phi=phi, stark_phase=delta * f2_int,
                      alpha_exact=theta + phi, alpha_approx=alpha_approx,
                      f2_integral=f2_int, quadrature_error=err)


def phases(params: SystemParams, env: PulseEnvelope, t: float, steps_per_cycle: int = 400):
    """Phases at a single time ``t`` (cycles).

    Returns ``(theta, phi, Delta_t, alpha_exact, alpha_approx)`` in radians.
    """
    t = float(t)
    if t < 0:
        raise DomainError(f"negative time {t}")
    if t == 0:
        return 0.0, 0.0, 0.0, 0.0, 0.0
    table = phase_table(params, env, TimeGrid(t, steps_per_cycle, 1))
    return (float(table.theta[-1]), float(table.phi[-1]), float(table.stark_phase[-1]),
            float(table.alpha_exact[-1]), float(table.alpha_approx[-1]))


@dataclass(frozen=True)
class ResonanceInfo:
    """Nearest even-photon 1-3 resonance.

    ``dynamic_detuning = omega31 + Delta - P`` and ``bare_detuning =
    omega31 - P``, both in omega0 units.
    """

    order_p: int
    dynamic_detuning: float
    bare_detuning: float
    ambiguous: bool = False


def detect_resonance(params: SystemParams) -> ResonanceInfo:
    p = params.normalized()
    shifted = p.omega31 + static_stark_shift(p)
    lo = 2 * math.floor(shifted / 2.0)
    hi = lo + 2
    d_lo, d_hi = shifted - lo, hi - shifted
    ambiguous = math.isclose(d_lo, d_hi, rel_tol=0.0, abs_tol=1e-12)
    if ambiguous:
        order = lo if abs(lo) < abs(hi) else hi
        warnings.warn(f"omega31 + Delta = {shifted:g} lies midway between even orders "
                      f"{lo} and {hi}; choosing P = {order}", stacklevel=2)
    else:
        order = lo if d_lo < d_hi else hi
    return ResonanceInfo(order_p=int(order), dynamic_detuning=shifted - order,
                         bare_detuning=p.omega31 - order, ambiguous=ambiguous)
