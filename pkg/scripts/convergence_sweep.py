"""GRWA against the full equations as omega21 grows at fixed dynamic resonance.

Sweeps omega21 over 13, 19, 25, 50 on the fig2 parameters with omega31 + Delta
held at its fig2 value, 200-cycle window, and prints the summary table.

    python3 scripts/convergence_sweep.py [--out DIR] [--jobs N]
"""

import argparse
import json
import warnings

from lambdarabi.analytic import ApplicabilityWarning
from lambdarabi.cli import sweep
from lambdarabi.scenario import BUILTIN, Scenario, parse_solver

FIG2_LOCK = 1.99445 + (0.5 ** 2 - 0.3 ** 2) / (2 * 13.0)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="out/convergence")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--values", default="13,19,25,50")
    args = ap.parse_args()
    warnings.simplefilter("ignore", ApplicabilityWarning)

    doc = json.loads(json.dumps(BUILTIN["fig2"]))
    doc.update(name="fig2_convergence", t_end=200.0, lock_resonance=FIG2_LOCK,
               outputs=["populations"], solver=parse_solver("grwa-smallz"))
    doc["numerics"] = {"verify": False}
    values = [float(v) for v in args.values.split(",")]
    rows = sweep(Scenario.from_doc(doc), "params.omega21", values, args.out,
                 pair=parse_solver("full"), jobs=args.jobs)
    print(f"{'omega21':>8s}  {'rms |b1|^2':>11s}  {'rms |b3|^2':>11s}")
    for r in rows:
        if r["status"] != "ok":
            print(f"{r['value']:8g}  {r['error']}")
            continue
        print(f"{r['value']:8g}  {r['rms_pop_b1']:11.4f}  {r['rms_pop_b3']:11.4f}")
    print(f"summary in {args.out}/summary.csv")


if __name__ == "__main__":
    main()
