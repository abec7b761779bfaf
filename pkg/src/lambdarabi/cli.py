"""Command-line front end: simulate, compare and sweep scenarios.

    lambdarabi simulate --scenario fig2 --out out/fig2
    lambdarabi compare --scenario fig2 --a grwa-smallz --b full --out out/cmp
    lambdarabi sweep --scenario fig2 --axis params.omega21 --values 13,19,25,50 --out out/sw
    lambdarabi --print-scenario fig3
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from lambdarabi import csvio
from lambdarabi.analytic import (amplitudes_from_riccati, floquet_series, grwa_series,
                                 riccati_solve)
from lambdarabi.effective import integrate_two_state, with_adiabatic_b2
from lambdarabi.errors import IntegratorError, ValidationError
from lambdarabi.model import detect_resonance, static_stark_shift
from lambdarabi.scenario import BUILTIN, Scenario, parse_solver
from lambdarabi.spectrum import coherent_spectrum, find_peaks, induced_dipole
from lambdarabi.tdse import integrate_full, integrate_ratios
from lambdarabi.timegrid import TWO_PI, TimeSeries

log = logging.getLogger("lambdarabi")

OUT_ENV = "LAMBDARABI_OUT"
HARMONICS = (1.0, 3.0, 5.0)


@dataclass
class RunResult:
    scenario: Scenario
    trajectory: TimeSeries
    riccati: object = None
    dipole: object = None
    spectrum: object = None
    peaks: list = None
    files: list = field(default_factory=list)


def _ratios_to_amplitudes(ts: TimeSeries, params, env) -> TimeSeries:
    # |b1| from normalisation, phase from i b1' = -Omega r b1 (trapezoid on samples)
    r, rho = ts["r"], ts["rho"]
    mod = 1.0 / np.sqrt(1.0 + np.abs(r) ** 2 + np.abs(rho) ** 2)
    p = params.normalized()
    omega = p.rabi_omega * env.value(ts.t) * p.carrier(TWO_PI * ts.t)
    g = (omega * r).real
    dtau = TWO_PI * (ts.t[1] - ts.t[0]) if len(ts.t) > 1 else 0.0
    phase = np.concatenate([[0.0], np.cumsum(0.5 * (g[1:] + g[:-1]) * dtau)])
    b1 = mod * np.exp(1j * phase)
    data = {"b1": b1, "b2": r * b1, "b3": rho * b1, "r": r, "rho": rho}
    return TimeSeries(ts.t, data, ts.steps_per_cycle, dict(ts.meta))


def solve(sc: Scenario):
    """Run the scenario's solver; returns ``(trajectory, riccati_solution)``."""
    params, env = sc.system_params(), sc.envelope()
    num = sc.numerics
    kw = {"steps_per_cycle": num["steps_per_cycle"],
          "samples_per_cycle": num["samples_per_cycle"]}
    s = sc.solver
    kind = s["kind"]
    ric = None
    if kind == "full":
        return integrate_full(params, env, sc.t_end, verify=num["verify"], **kw), None
    if kind == "ratios":
        ts = integrate_ratios(params, env, sc.t_end, truncate=True, **kw)
        return _ratios_to_amplitudes(ts, params, env), None
    if kind == "two_state":
        ts = integrate_two_state(params, env, sc.t_end, mode=sc.coupling_mode(), **kw)
    elif kind == "riccati":
        ric = riccati_solve(params, env, sc.t_end, mode=sc.coupling_mode(), **kw)
        ts = amplitudes_from_riccati(ric, params, env)
    elif kind == "grwa":
        ts = grwa_series(params, env, sc.t_end, P=s["P"], rabi_form=s["rabi_form"], **kw)
    else:
        ts = floquet_series(params, env, sc.t_end, P=s["P"], **kw)
    return with_adiabatic_b2(ts, params, env), ric


def first_transfer_time(ts: TimeSeries, threshold: float = 0.5):
    """Argmax of ``|b3|^2`` over its first excursion above ``threshold``."""
    p3 = ts.population("b3")
    above = np.nonzero(p3 > threshold)[0]
    if len(above) == 0:
        return None
    start = above[0]
    below = np.nonzero(p3[start:] <= threshold)[0]
    stop = start + below[0] if len(below) else len(p3)
    return float(ts.t[start + int(np.argmax(p3[start:stop]))])


def run(sc: Scenario, out_dir=None) -> RunResult:
    """Solve a scenario and (optionally) write its outputs to ``out_dir``."""
    params, env = sc.system_params(), sc.envelope()
    traj, ric = solve(sc)
    res = RunResult(sc, traj, ric)
    spec_cfg = sc.spectrum
    if {"dipole", "spectrum", "peaks"} & set(sc.outputs):
        res.dipole = induced_dipole(traj, params, env)
    if {"spectrum", "peaks"} & set(sc.outputs):
        window = tuple(spec_cfg["window"]) if spec_cfg["window"] else None
        res.spectrum = coherent_spectrum(res.dipole, spec_cfg["omega_max"],
                                         spec_cfg["resolution"], window)
        res.peaks = find_peaks(res.spectrum, spec_cfg["min_relative_height"],
                               spec_cfg["min_separation"])
    if out_dir is not None:
        _write_run(res, Path(out_dir))
    return res


def _write_run(res: RunResult, out: Path):
    out.mkdir(parents=True, exist_ok=True)
    sc = res.scenario
    head = [sc.header()]
    files = []

    def target(name):
        path = out / name
        files.append(path)
        return path

    target("scenario.json").write_text(sc.to_json() + "\n", newline="\n")
    if "amplitudes" in sc.outputs:
        csvio.timeseries_csv(target("amplitudes.csv"), res.trajectory, head)
    if "populations" in sc.outputs:
        csvio.populations_csv(target("populations.csv"), res.trajectory, head)
    if "dipole" in sc.outputs:
        csvio.dipole_csv(target("dipole.csv"), res.dipole, head)
    if "spectrum" in sc.outputs:
        csvio.spectrum_csv(target("spectrum.csv"), res.spectrum, head)
    if "peaks" in sc.outputs:
        csvio.peaks_csv(target("peaks.csv"), res.peaks, head)
    if res.riccati is not None:
        r = res.riccati
        cols = np.column_stack([r.t, r.x0.real, r.x0.imag, r.x1, r.x.real, r.x.imag,
                                r.beta.real, r.beta.imag, r.validity])
        csvio.write_csv(target("riccati.csv"),
                        ["t_cycles", "re_x0", "im_x0", "x1", "re_x", "im_x", "re_beta",
                         "im_beta", "validity"], cols, head)
    res.files = files


def _metrics(a: np.ndarray, b: np.ndarray) -> dict:
    d = np.abs(a - b)
    return {"rms": float(np.sqrt(np.mean(d ** 2))), "sup": float(np.max(d))}


def _harmonic_heights(traj, params, env, sc):
    rate = sc.numerics["samples_per_cycle"]
    omega_max = max(HARMONICS) + 0.5
    if rate < 4 * omega_max:
        return None
    dip = induced_dipole(traj, params, env)
    spec = coherent_spectrum(dip, omega_max)
    ref = spec.power_at(1.0)
    return {f"{w:g}": (spec.power_at(w) / ref if ref > 0 else 0.0) for w in HARMONICS}


def compare(sc: Scenario, solver_a: dict, solver_b: dict, out_dir=None) -> dict:
    """Run two solvers on the same output grid and difference their observables."""
    params, env = sc.system_params(), sc.envelope()
    sa, sb = sc.with_solver(solver_a), sc.with_solver(solver_b)
    ta, ric_a = solve(sa)
    tb, ric_b = solve(sb)
    n = min(len(ta.t), len(tb.t))
    if not np.allclose(ta.t[:n], tb.t[:n], rtol=0, atol=1e-9):
        raise RuntimeError("solver grids differ")  # cannot happen: same TimeGrid
    obs = {
        "pop_b1": lambda ts: ts.population("b1")[:n],
        "pop_b3": lambda ts: ts.population("b3")[:n],
        "re_b1": lambda ts: ts["b1"].real[:n],
        "im_b1": lambda ts: ts["b1"].imag[:n],
    }
    errors = {name: _metrics(f(ta), f(tb)) for name, f in obs.items()}
    res = detect_resonance(params)
    report = {
        "scenario": sc.name,
        "solver_a": solver_a,
        "solver_b": solver_b,
        "n_samples": int(n),
        "t_window": [float(ta.t[0]), float(ta.t[n - 1])],
        "errors": errors,
        "resonance": {"P": res.order_p, "dynamic_detuning": res.dynamic_detuning,
                      "bare_detuning": res.bare_detuning,
                      "stark_shift": static_stark_shift(params)},
        "validity": None,
        "harmonics": None,
    }
    for ric in (ric_a, ric_b):
        if ric is not None:
            report["validity"] = {"max": float(np.nanmax(ric.validity)),
                                  "fraction_flagged": float(np.mean(ric.flagged)),
                                  "singularity_times": ric.singularity_times}
    ha = _harmonic_heights(ta, params, env, sc)
    hb = _harmonic_heights(tb, params, env, sc)
    if ha is not None and hb is not None:
        report["harmonics"] = {"a": ha, "b": hb,
                               "abs_diff": {k: abs(ha[k] - hb[k]) for k in ha}}
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                                         newline="\n")
        with open(out / "comparison.csv", "w", newline="\n") as fh:
            fh.write(f"# {sc.header()}\n")
            fh.write("observable,rms,sup\n")
            for name, m in errors.items():
                fh.write(f"{name},{m['rms']:.11e},{m['sup']:.11e}\n")
    return report


def _sweep_one(args):
    sc_doc, axis, value, pair, out_dir = args
    sc = Scenario(sc_doc)
    row = {"value": value, "status": "ok", "error": "", "max_pop_b2": None,
           "first_transfer_time": None, "rabi_period_estimate": None, "peaks": "",
           "p3_over_p1": None, "p5_over_p3": None, "rms_pop_b1": None, "rms_pop_b3": None}
    try:
        sc = sc.with_value(axis, value)
        res = run(sc, out_dir)
        traj = res.trajectory
        if "b2" in traj:
            row["max_pop_b2"] = float(np.max(traj.population("b2")))
        t1 = first_transfer_time(traj)
        row["first_transfer_time"] = t1
        row["rabi_period_estimate"] = None if t1 is None else 2.0 * t1
        if res.spectrum is not None:
            p1, p3, p5 = (res.spectrum.power_at(w) for w in HARMONICS)
            row["p3_over_p1"] = p3 / p1 if p1 > 0 else None
            row["p5_over_p3"] = p5 / p3 if p3 > 0 else None
        if res.peaks:
            row["peaks"] = ";".join(f"{w:.6g}:{p:.6g}" for w, p in res.peaks[:5])
        if pair is not None:
            rep = compare(sc, sc.solver, pair)
            row["rms_pop_b1"] = rep["errors"]["pop_b1"]["rms"]
            row["rms_pop_b3"] = rep["errors"]["pop_b3"]["rms"]
    except (ValidationError, IntegratorError, ValueError, ArithmeticError) as exc:
        row["status"] = "error"
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


SUMMARY_FIELDS = ("value", "status", "max_pop_b2", "first_transfer_time",
                  "rabi_period_estimate", "p3_over_p1", "p5_over_p3", "rms_pop_b1",
                  "rms_pop_b3", "peaks", "error")


def sweep(sc: Scenario, axis: str, values, out_dir=None, pair: dict | None = None,
          jobs: int = 1) -> list[dict]:
    """One run per value of the dotted scenario field ``axis``.

    Individual failures are recorded in their row; the sweep continues.
    Rows are sorted by axis value.
    """
    values = sorted(values)
    out = Path(out_dir) if out_dir is not None else None
    tasks = []
    for k, v in enumerate(values):
        sub = None if out is None else out / f"{k:03d}_{v:g}"
        tasks.append((sc.doc, axis, v, pair, sub))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_one, tasks))
    else:
        rows = [_sweep_one(t) for t in tasks]
    rows.sort(key=lambda r: r["value"])
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "summary.csv", "w", newline="") as fh:
            fh.write(f"# {sc.header()}\n# axis {axis}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SUMMARY_FIELDS)
            for r in rows:
                w.writerow([_fmt(r[f]) for f in SUMMARY_FIELDS])
    return rows


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.11e}"
    return str(v)


def _parse_values(text: str) -> list:
    text = text.strip()
    if not text:
        return []
    if text.startswith("["):
        vals = json.loads(text)
    else:
        vals = [float(x) for x in text.split(",") if x.strip()]
    return [float(v) for v in vals]


def _default_out(name):
    return Path(os.environ.get(OUT_ENV, "out")) / name


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lambdarabi", description=__doc__.splitlines()[0])
    ap.add_argument("--print-scenario", metavar="NAME",
                    help=f"print a resolved built-in scenario ({', '.join(sorted(BUILTIN))})")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("simulate", help="run one scenario")
    p.add_argument("--scenario", required=True, help="built-in name or JSON file")
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV}/<name>)")

    p = sub.add_parser("compare", help="difference two solvers on one scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--a", required=True, help="solver shorthand or JSON object")
    p.add_argument("--b", required=True)
    p.add_argument("--out")

    p = sub.add_parser("sweep", help="run a scenario over values of one field")
    p.add_argument("--scenario", required=True)
    p.add_argument("--axis", required=True, help="dotted field, e.g. params.omega21")
    p.add_argument("--values", required=True, help="comma list or JSON array")
    p.add_argument("--pair", help="second solver for per-row comparison errors")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    return ap


def _fail(kind, message, code, **extra):
    sys.stderr.write(json.dumps({"error": kind, "message": message, **extra}) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if not args.verbose:
        warnings.simplefilter("ignore")
    try:
        if args.print_scenario:
            if args.print_scenario not in BUILTIN:
                raise ValidationError("print-scenario",
                                      f"unknown scenario {args.print_scenario!r}")
            print(Scenario.load(args.print_scenario).to_json())
            return 0
        if args.command is None:
            build_parser().print_help()
            return 0
        sc = Scenario.load(args.scenario)
        if args.command == "simulate":
            out = args.out or _default_out(sc.name)
            res = run(sc, out)
            for f in res.files:
                print(f)
        elif args.command == "compare":
            out = args.out or _default_out(f"{sc.name}_compare")
            rep = compare(sc, parse_solver(args.a), parse_solver(args.b), out)
            print(json.dumps(rep["errors"], indent=2, sort_keys=True))
        elif args.command == "sweep":
            out = args.out or _default_out(f"{sc.name}_sweep")
            pair = parse_solver(args.pair) if args.pair else None
            rows = sweep(sc, args.axis, _parse_values(args.values), out, pair, args.jobs)
            print(Path(out) / "summary.csv")
            if any(r["status"] != "ok" for r in rows):
                log.warning("%d sweep rows failed", sum(r["status"] != "ok" for r in rows))
    except ValidationError as exc:
        return _fail("ValidationError", exc.message, 2, path=exc.path)
    except IntegratorError as exc:
        return _fail(type(exc).__name__, str(exc), 3,
                     report={k: (v if isinstance(v, (int, float, str)) else str(v))
                             for k, v in exc.report.items()})
    except (OSError, ValueError) as exc:
        return _fail(type(exc).__name__, str(exc), 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
