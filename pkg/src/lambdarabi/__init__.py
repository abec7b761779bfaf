"""Multiphoton dynamics of a driven three-level lambda system.

Exact numerical integration, the adiabatic/GRWA analytic chain and the
coherent scattering spectrum, in units where omega0 = 1 and time is
measured in optical cycles at the API boundary.
"""

from lambdarabi.model import (
    Carrier,
    PulseEnvelope,
    ResonanceInfo,
    SineRampFlat,
    SmoothSquaredExp,
    SystemParams,
    detect_resonance,
    envelope_value,
    instantaneous_rabi,
    phases,
    static_stark_shift,
)
from lambdarabi.timegrid import TimeGrid, TimeSeries

__all__ = [
    "Carrier",
    "PulseEnvelope",
    "ResonanceInfo",
    "SineRampFlat",
    "SmoothSquaredExp",
    "SystemParams",
    "TimeGrid",
    "TimeSeries",
    "detect_resonance",
    "envelope_value",
    "instantaneous_rabi",
    "phases",
    "static_stark_shift",
]
