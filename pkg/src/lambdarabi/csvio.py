"""Deterministic CSV output: 12 significant digits, LF endings, ``#`` headers."""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

FLOAT_FMT = "%.11e"


def write_csv(path, names, rows, header_lines=(), fmt=FLOAT_FMT):
    """Write a numeric table.  ``header_lines`` become ``# `` comments."""
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    buf.write(",".join(names) + "\n")
    rows = np.atleast_2d(np.asarray(rows, dtype=float)) if len(rows) else np.empty((0, len(names)))
    if len(rows):
        np.savetxt(buf, rows, fmt=fmt, delimiter=",", newline="\n")
    Path(path).write_text(buf.getvalue(), newline="\n")


def read_csv(path):
    """Read a file written by :func:`write_csv`; returns ``(names, array)``."""
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    names = lines[0].split(",")
    if len(lines) == 1:
        return names, np.empty((0, len(names)))
    data = np.loadtxt(lines[1:], delimiter=",", ndmin=2)
    return names, data


def timeseries_csv(path, ts, header_lines=()):
    names, cols = ts.columns()
    write_csv(path, names, cols, header_lines)


def populations_csv(path, ts, header_lines=()):
    names = ["t_cycles"]
    cols = [ts.t]
    for name in ("b1", "b2", "b3", "u", "v"):
        if name in ts:
            names.append(f"pop_{name}")
            cols.append(ts.population(name))
    write_csv(path, names, np.column_stack(cols), header_lines)


def spectrum_csv(path, spec, header_lines=()):
    write_csv(path, ["omega_over_omega0", "relative_power"],
              np.column_stack([spec.omega, spec.power]), header_lines)


def peaks_csv(path, peaks, header_lines=()):
    rows = [(w, p, k + 1) for k, (w, p) in enumerate(peaks)]
    buf_rows = np.array(rows, dtype=float) if rows else []
    write_csv(path, ["omega_over_omega0", "relative_power", "rank"], buf_rows, header_lines,
              fmt=[FLOAT_FMT, FLOAT_FMT, "%d"])


def dipole_csv(path, dip, header_lines=()):
    write_csv(path, ["t_cycles", "d_induced"], np.column_stack([dip.t, dip.d]), header_lines)
