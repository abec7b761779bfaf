"""Uniform time grids, cumulative quadrature and sampled trajectories.

Times handed to or returned from the public API are in optical cycles.
Internally everything runs on the dimensionless phase ``tau = omega0 * t``,
so one cycle is ``2 pi`` and every rate is expressed in units of omega0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


def cycles_to_tau(t_cycles):
    return TWO_PI * np.asarray(t_cycles, dtype=float)


def tau_to_cycles(tau):
    return np.asarray(tau, dtype=float) / TWO_PI


@dataclass(frozen=True)
class TimeGrid:
    """Fixed-step grid on ``[0, t_end]`` with RK4 half-step nodes.

    ``n_steps`` full steps of width ``h`` (in tau).  The half-step nodes
    ``tau_half[j] = j*h/2`` carry every forcing term the integrators need,
    and double as Simpson nodes for the cumulative phase integrals.
    """

    t_end: float
    steps_per_cycle: int = 400
    samples_per_cycle: int = 20

    def __post_init__(self):
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if self.steps_per_cycle < 1 or self.samples_per_cycle < 1:
            raise ValueError("steps_per_cycle and samples_per_cycle must be >= 1")
        if self.steps_per_cycle % self.samples_per_cycle:
            raise ValueError(
                f"samples_per_cycle={self.samples_per_cycle} must divide "
                f"steps_per_cycle={self.steps_per_cycle}"
            )

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil(self.t_end * self.steps_per_cycle - 1e-9))

    @property
    def h(self) -> float:
        return TWO_PI * self.t_end / self.n_steps

    @property
    def stride(self) -> int:
        return self.steps_per_cycle // self.samples_per_cycle

    @property
    def tau_half(self) -> np.ndarray:
        return 0.5 * self.h * np.arange(2 * self.n_steps + 1)

    @property
    def tau_full(self) -> np.ndarray:
        return self.h * np.arange(self.n_steps + 1)

    @property
    def sample_index(self) -> np.ndarray:
        """Full-step indices at which trajectories are recorded."""
        return np.arange(0, self.n_steps + 1, self.stride)

    @property
    def t_samples(self) -> np.ndarray:
        return tau_to_cycles(self.tau_full[self.sample_index])

    def refined(self, factor: int = 2) -> "TimeGrid":
        return TimeGrid(self.t_end, self.steps_per_cycle * factor,
                        self.samples_per_cycle)

    def cumulative(self, integrand_half) -> np.ndarray:
        """Running integral of ``integrand_half`` (sampled on ``tau_half``).

        Composite Simpson per full step; returns the integral at every
        full-step node, starting from 0.
        """
        y = np.asarray(integrand_half)
        panels = (y[:-1:2] + 4.0 * y[1::2] + y[2::2]) * (self.h / 6.0)
        out = np.empty(self.n_steps + 1, dtype=panels.dtype)
        out[0] = 0.0
        np.cumsum(panels, out=out[1:])
        return out

    def cumulative_error(self, integrand_half) -> float:
        """Richardson estimate of the absolute error of :meth:`cumulative`.

        Compares per-step Simpson with Simpson over pairs of steps (nodes
        at full steps only), at the even full-step nodes.
        """
        fine = self.cumulative(integrand_half)
        y = np.asarray(integrand_half)[::2]
        m = (len(y) - 1) // 2
        if m == 0:
            return 0.0
        panels = (y[:2 * m - 1:2] + 4.0 * y[1:2 * m:2] + y[2:2 * m + 1:2]) * (self.h / 3.0)
        coarse = np.concatenate([[0.0], np.cumsum(panels)])
        return float(np.max(np.abs(fine[:2 * m + 1:2] - coarse)) / 15.0)


@dataclass
class TimeSeries:
    """Uniformly sampled trajectory of one state view.

    ``data`` maps component names (``b1``, ``r``, ``u`` ...) to complex
    arrays the same length as ``t``.  ``meta`` holds diagnostics such as
    norm drift.
    """

    t: np.ndarray
    data: dict
    steps_per_cycle: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        if self.t.ndim != 1 or len(self.t) == 0:
            raise ValueError("t must be a non-empty 1-d array")
        if len(self.t) > 1:
            dt = np.diff(self.t)
            if np.any(dt <= 0) or np.ptp(dt) > 1e-9 * max(1.0, abs(dt[0])):
                raise ValueError("time grid must be strictly increasing and uniform")
        for name, values in self.data.items():
            if len(values) != len(self.t):
                raise ValueError(f"component {name!r} has {len(values)} samples, "
                                 f"grid has {len(self.t)}")

    def __getitem__(self, name) -> np.ndarray:
        return self.data[name]

    def __contains__(self, name) -> bool:
        return name in self.data

    @property
    def components(self) -> list:
        return list(self.data)

    def population(self, name) -> np.ndarray:
        return np.abs(self.data[name]) ** 2

    def columns(self) -> tuple[list, np.ndarray]:
        """Flatten to real columns ``t_cycles, re_x, im_x, ...``."""
        names = ["t_cycles"]
        cols = [self.t]
        for name, values in self.data.items():
            values = np.asarray(values)
            names += [f"re_{name}", f"im_{name}"]
            cols += [values.real, values.imag]
        return names, np.column_stack(cols)
