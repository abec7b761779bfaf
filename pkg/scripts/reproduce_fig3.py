"""Fig-3 parameter sets: effective two-state system against the full equations.

Runs ``fig3`` (omega21 = 19) and ``fig3c`` (omega21 = 50) with the slow
two-state reduction and the full three-level solver, writes the
populations and prints the rms population error of each.

    python3 scripts/reproduce_fig3.py [--out DIR]
"""

import argparse
import warnings
from pathlib import Path

from lambdarabi.analytic import ApplicabilityWarning
from lambdarabi.cli import compare, run
from lambdarabi.scenario import Scenario, parse_solver


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="out/fig3")
    args = ap.parse_args()
    warnings.simplefilter("ignore", ApplicabilityWarning)
    out = Path(args.out)

    for name in ("fig3", "fig3c"):
        sc = Scenario.load(name)
        run(sc, out / name / "two_state")
        run(sc.with_solver({"kind": "full"}), out / name / "full")
        rep = compare(sc, sc.solver, parse_solver("full"), out / name / "compare")
        err = rep["errors"]
        print(f"{name:6s} omega21 = {sc.doc['params']['omega21']:g}: rms |b1|^2 error "
              f"{err['pop_b1']['rms']:.4f}, rms |b3|^2 error {err['pop_b3']['rms']:.4f}")
    print(f"datasets in {out}")


if __name__ == "__main__":
    main()
