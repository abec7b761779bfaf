"""Declarative scenarios: parameters, pulse, solver and requested outputs.

Scenarios are JSON documents.  :func:`resolve` fills every default so the
resolved form echoes back byte-for-byte through :func:`to_json`.
"""

from __future__ import annotations

import copy
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from lambdarabi.effective import BesselTruncated, Exact, SlowOnly
from lambdarabi.errors import ValidationError
from lambdarabi.model import PulseEnvelope, SystemParams, detect_resonance, static_stark_shift

SOLVERS = ("full", "ratios", "two_state", "riccati", "grwa", "floquet")
OUTPUTS = ("amplitudes", "populations", "dipole", "spectrum", "peaks")
MODE_KINDS = ("exact", "bessel", "slow_only")

DEFAULTS = {
    "name": "custom",
    "lock_resonance": None,
    "numerics": {"steps_per_cycle": 1600, "samples_per_cycle": 20, "verify": True},
    "spectrum": {"omega_max": 8.0, "resolution": None, "window": None,
                 "min_relative_height": 1e-9, "min_separation": 0.5},
    "outputs": ["populations"],
}

BUILTIN = {
    "fig2": {
        "name": "fig2",
        "params": {"omega21": 13.0, "omega31": 1.99445, "rabi_omega": 0.5, "rabi_m": 0.3,
                   "carrier": "cos"},
        "envelope": {"shape": "sine_ramp_flat", "rise_cycles": 4.0},
        "t_end": 400.0,
        "solver": {"kind": "full"},
        "outputs": ["amplitudes", "populations", "dipole", "spectrum", "peaks"],
        "numerics": {"samples_per_cycle": 40},
    },
    "fig3": {
        "name": "fig3",
        "params": {"omega21": 19.0, "omega31": 2.0, "rabi_omega": 0.8, "rabi_m": 0.7,
                   "carrier": "cos"},
        "envelope": {"shape": "smooth_squared_exp", "tau_cycles": 100.0},
        "t_end": 300.0,
        "solver": {"kind": "two_state",
                   "mode": {"kind": "slow_only", "P": 2, "with_phase_factor": True}},
        "outputs": ["amplitudes", "populations", "dipole", "spectrum", "peaks"],
        "numerics": {"samples_per_cycle": 40},
    },
    "fig3c": {
        "name": "fig3c",
        "params": {"omega21": 50.0, "omega31": 2.0, "rabi_omega": 0.8, "rabi_m": 0.7,
                   "carrier": "cos"},
        "envelope": {"shape": "smooth_squared_exp", "tau_cycles": 100.0},
        "t_end": 300.0,
        "solver": {"kind": "two_state",
                   "mode": {"kind": "slow_only", "P": 2, "with_phase_factor": True}},
        "outputs": ["populations"],
    },
    # deliberately outside the regime of the x0 + x1 Riccati splitting
    "strong": {
        "name": "strong",
        "params": {"omega21": 5.0, "omega31": 0.3, "rabi_omega": 2.0, "rabi_m": 2.0,
                   "carrier": "cos"},
        "envelope": {"shape": "sine_ramp_flat", "rise_cycles": 4.0},
        "t_end": 40.0,
        "solver": {"kind": "riccati", "mode": {"kind": "exact"}},
        "outputs": ["amplitudes", "populations"],
    },
    "zero_field": {
        "name": "zero_field",
        "params": {"omega21": 13.0, "omega31": 1.99445, "rabi_omega": 0.0, "rabi_m": 0.0,
                   "carrier": "cos"},
        "envelope": {"shape": "sine_ramp_flat", "rise_cycles": 4.0},
        "t_end": 20.0,
        "solver": {"kind": "full"},
        "outputs": ["populations"],
    },
}


def _merge(base, over):
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _check_keys(d, allowed, path):
    if not isinstance(d, dict):
        raise ValidationError(path, "must be an object")
    for k in d:
        if k not in allowed:
            raise ValidationError(f"{path}.{k}" if path else k, "unknown field")


def _number(d, key, path, positive=False, integer=False):
    v = d.get(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ValidationError(f"{path}.{key}", "must be a finite number")
    if integer and int(v) != v:
        raise ValidationError(f"{path}.{key}", "must be an integer")
    if positive and v <= 0:
        raise ValidationError(f"{path}.{key}", "must be positive")
    return int(v) if integer else float(v)


def _resolve_mode(m, path):
    _check_keys(m, ("kind", "P", "with_phase_factor", "rabi_form", "n_max", "exact_phase"),
                path)
    kind = m.get("kind")
    if kind == "exact":
        return {"kind": "exact", "exact_phase": bool(m.get("exact_phase", False))}
    if kind == "bessel":
        n_max = m.get("n_max")
        if n_max is not None:
            n_max = _number(m, "n_max", path, integer=True)
        return {"kind": "bessel", "n_max": n_max}
    if kind == "slow_only":
        P = m.get("P")
        if P is not None:
            P = _number(m, "P", path, integer=True)
            if P % 2:
                raise ValidationError(f"{path}.P", "resonance order must be even")
        form = m.get("rabi_form", "general")
        if form not in ("general", "smallz"):
            raise ValidationError(f"{path}.rabi_form", "must be 'general' or 'smallz'")
        return {"kind": "slow_only", "P": P,
                "with_phase_factor": bool(m.get("with_phase_factor", False)),
                "rabi_form": form}
    raise ValidationError(f"{path}.kind", f"must be one of {MODE_KINDS}")


def _resolve_solver(s, path="solver"):
    _check_keys(s, ("kind", "mode", "rabi_form", "P"), path)
    kind = s.get("kind")
    if kind not in SOLVERS:
        raise ValidationError(f"{path}.kind", f"must be one of {SOLVERS}")
    out = {"kind": kind}
    if kind in ("two_state", "riccati"):
        out["mode"] = _resolve_mode(s.get("mode", {"kind": "exact"}), f"{path}.mode")
    if kind in ("grwa", "floquet"):
        P = s.get("P")
        if P is not None:
            P = _number(s, "P", path, integer=True)
            if P % 2:
                raise ValidationError(f"{path}.P", "resonance order must be even")
        out["P"] = P
    if kind == "grwa":
        form = s.get("rabi_form", "general")
        if form not in ("general", "smallz"):
            raise ValidationError(f"{path}.rabi_form", "must be 'general' or 'smallz'")
        out["rabi_form"] = form
    return out


def resolve(doc: dict) -> dict:
    """Validate a scenario document and fill in every default."""
    _check_keys(doc, ("name", "params", "envelope", "t_end", "solver", "outputs",
                      "numerics", "spectrum", "lock_resonance"), "")
    for key in ("params", "envelope", "t_end", "solver"):
        if key not in doc:
            raise ValidationError(key, "required field missing")
    d = _merge(DEFAULTS, doc)
    if "outputs" in doc:
        d["outputs"] = list(doc["outputs"])

    _check_keys(d["params"], ("omega21", "omega31", "rabi_omega", "rabi_m", "carrier",
                              "omega0"), "params")
    params = {k: _number(d["params"], k, "params")
              for k in ("omega21", "omega31", "rabi_omega", "rabi_m")}
    params["carrier"] = d["params"].get("carrier", "cos")
    if params["carrier"] not in ("cos", "sin"):
        raise ValidationError("params.carrier", "must be 'cos' or 'sin'")
    params["omega0"] = _number({"omega0": d["params"].get("omega0", 1.0)}, "omega0",
                               "params", positive=True)
    d["params"] = params

    env = d["envelope"]
    if env.get("shape") == "sine_ramp_flat":
        _check_keys(env, ("shape", "rise_cycles"), "envelope")
        d["envelope"] = {"shape": "sine_ramp_flat",
                         "rise_cycles": _number(env, "rise_cycles", "envelope", positive=True)}
    elif env.get("shape") == "smooth_squared_exp":
        _check_keys(env, ("shape", "tau_cycles"), "envelope")
        d["envelope"] = {"shape": "smooth_squared_exp",
                         "tau_cycles": _number(env, "tau_cycles", "envelope", positive=True)}
    else:
        raise ValidationError("envelope.shape",
                              "must be 'sine_ramp_flat' or 'smooth_squared_exp'")

    d["t_end"] = _number(d, "t_end", "", positive=True)
    if d["lock_resonance"] is not None:
        d["lock_resonance"] = _number(d, "lock_resonance", "")
    d["solver"] = _resolve_solver(d["solver"])

    bad = [o for o in d["outputs"] if o not in OUTPUTS]
    if bad:
        raise ValidationError("outputs", f"unknown outputs {bad}; choose from {OUTPUTS}")
    d["outputs"] = [o for o in OUTPUTS if o in d["outputs"]]

    num = d["numerics"]
    _check_keys(num, ("steps_per_cycle", "samples_per_cycle", "verify"), "numerics")
    num["steps_per_cycle"] = _number(num, "steps_per_cycle", "numerics", positive=True,
                                     integer=True)
    num["samples_per_cycle"] = _number(num, "samples_per_cycle", "numerics", positive=True,
                                       integer=True)
    num["verify"] = bool(num["verify"])
    if num["steps_per_cycle"] < 100:
        raise ValidationError("numerics.steps_per_cycle", "must be at least 100")
    if num["steps_per_cycle"] % num["samples_per_cycle"]:
        raise ValidationError("numerics.samples_per_cycle", "must divide steps_per_cycle")

    sp = d["spectrum"]
    _check_keys(sp, ("omega_max", "resolution", "window", "min_relative_height",
                     "min_separation"), "spectrum")
    sp["omega_max"] = _number(sp, "omega_max", "spectrum", positive=True)
    if sp["resolution"] is not None:
        sp["resolution"] = _number(sp, "resolution", "spectrum", positive=True, integer=True)
    if sp["window"] is not None:
        w = sp["window"]
        if (not isinstance(w, list) or len(w) != 2
                or not all(isinstance(x, (int, float)) for x in w) or not w[0] < w[1]):
            raise ValidationError("spectrum.window", "must be [t_start, t_end] with start < end")
        sp["window"] = [float(w[0]), float(w[1])]
    sp["min_relative_height"] = _number(sp, "min_relative_height", "spectrum")
    sp["min_separation"] = _number(sp, "min_separation", "spectrum")
    if ("spectrum" in d["outputs"] or "peaks" in d["outputs"]) and \
            num["samples_per_cycle"] < 4 * sp["omega_max"]:
        raise ValidationError("numerics.samples_per_cycle",
                              f"spectrum up to omega_max={sp['omega_max']:g} needs at least "
                              f"{4 * sp['omega_max']:g} samples per cycle")

    sc = Scenario(d)
    sc.system_params()  # physical validation
    return d


@dataclass
class Scenario:
    """Resolved scenario document with typed accessors."""

    doc: dict = field(default_factory=dict)

    @classmethod
    def from_doc(cls, doc: dict) -> "Scenario":
        return cls(resolve(doc))

    @classmethod
    def load(cls, ref: str) -> "Scenario":
        """A built-in name or a path to a JSON file."""
        if ref in BUILTIN:
            return cls.from_doc(BUILTIN[ref])
        path = Path(ref)
        if not path.exists():
            raise ValidationError("scenario", f"{ref!r} is neither a built-in scenario "
                                  f"{sorted(BUILTIN)} nor an existing file")
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ValidationError("scenario", f"invalid JSON: {exc}") from None
        return cls.from_doc(doc)

    def to_json(self, indent=2) -> str:
        return json.dumps(self.doc, indent=indent, sort_keys=True)

    def header(self) -> str:
        return "scenario " + json.dumps(self.doc, sort_keys=True, separators=(",", ":"))

    def with_value(self, path: str, value) -> "Scenario":
        """Copy with the dotted field ``path`` replaced (re-validated).

        The pseudo-field ``field_scale`` multiplies both Rabi frequencies,
        i.e. scales the peak field at fixed dipole ratio.
        """
        doc = copy.deepcopy(self.doc)
        if path == "field_scale":
            doc["params"]["rabi_omega"] *= float(value)
            doc["params"]["rabi_m"] *= float(value)
            return Scenario.from_doc(doc)
        keys = path.split(".")
        node = doc
        for k in keys[:-1]:
            if not isinstance(node.get(k), dict):
                raise ValidationError(path, "not a scenario field")
            node = node[k]
        if keys[-1] not in node:
            raise ValidationError(path, "not a scenario field")
        node[keys[-1]] = value
        return Scenario.from_doc(doc)

    def with_solver(self, solver: dict) -> "Scenario":
        doc = copy.deepcopy(self.doc)
        doc["solver"] = solver
        return Scenario.from_doc(doc)

    @property
    def name(self):
        return self.doc["name"]

    @property
    def t_end(self):
        return self.doc["t_end"]

    @property
    def solver(self):
        return self.doc["solver"]

    @property
    def outputs(self):
        return self.doc["outputs"]

    @property
    def numerics(self):
        return self.doc["numerics"]

    @property
    def spectrum(self):
        return self.doc["spectrum"]

    def system_params(self) -> SystemParams:
        p = dict(self.doc["params"])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            base = SystemParams(**p)
        lock = self.doc.get("lock_resonance")
        if lock is not None:
            # hold omega31 + Delta at the requested value
            p["omega31"] = lock * base.omega0 - static_stark_shift(base) * base.omega0
        try:
            return SystemParams(**p)
        except ValidationError as exc:
            raise ValidationError(f"params.{exc.path.split('.')[-1]}", exc.message) from None

    def envelope(self) -> PulseEnvelope:
        return PulseEnvelope.from_dict(self.doc["envelope"])

    def coupling_mode(self):
        m = self.solver.get("mode")
        if m is None:
            return None
        if m["kind"] == "exact":
            return Exact(m["exact_phase"])
        if m["kind"] == "bessel":
            return BesselTruncated(m["n_max"])
        P = m["P"]
        if P is None:
            P = detect_resonance(self.system_params()).order_p
        return SlowOnly(P, m["with_phase_factor"], m["rabi_form"])


SHORTHAND = {
    "full": {"kind": "full"},
    "ratios": {"kind": "ratios"},
    "grwa": {"kind": "grwa", "rabi_form": "general"},
    "grwa-smallz": {"kind": "grwa", "rabi_form": "smallz"},
    "floquet": {"kind": "floquet"},
    "two-state-exact": {"kind": "two_state", "mode": {"kind": "exact"}},
    "two-state-bessel": {"kind": "two_state", "mode": {"kind": "bessel"}},
    "two-state-slow": {"kind": "two_state", "mode": {"kind": "slow_only"}},
    "two-state-slow-phase": {"kind": "two_state",
                             "mode": {"kind": "slow_only", "with_phase_factor": True}},
    "riccati-exact": {"kind": "riccati", "mode": {"kind": "exact"}},
    "riccati-bessel": {"kind": "riccati", "mode": {"kind": "bessel"}},
    "riccati-slow": {"kind": "riccati", "mode": {"kind": "slow_only"}},
}


def parse_solver(text: str) -> dict:
    """Solver from a shorthand name (see ``SHORTHAND``) or an inline JSON object."""
    text = text.strip()
    if text.startswith("{"):
        try:
            return _resolve_solver(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ValidationError("solver", f"invalid JSON: {exc}") from None
    if text not in SHORTHAND:
        raise ValidationError("solver", f"unknown solver {text!r}; choose from "
                              f"{sorted(SHORTHAND)} or pass a JSON object")
    return _resolve_solver(SHORTHAND[text])
