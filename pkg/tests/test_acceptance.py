"""Acceptance criteria A1-A10, each at its stated tolerance.

Every test appends one PASS/FAIL line that is printed in the terminal
summary.
"""

import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lambdarabi.analytic import floquet_amplitudes, grwa_amplitudes, integrate_riccati, riccati_solve
from lambdarabi.cli import compare, first_transfer_time
from lambdarabi.effective import Exact
from lambdarabi.model import SineRampFlat, SystemParams, detect_resonance, static_stark_shift
from lambdarabi.scenario import BUILTIN, Scenario, parse_solver
from lambdarabi.spectrum import coherent_spectrum, find_peaks, induced_dipole
from lambdarabi.specfn import bessel_j_small, jn
from lambdarabi.tdse import integrate_full, integrate_ratios

# omega31 + Delta for fig2, held fixed while omega21 varies
FIG2_LOCK = 1.99445 + (0.5 ** 2 - 0.3 ** 2) / (2 * 13.0)
HALF_RABI_FIG2 = 2.0 + 1.0 / (4 * 0.5 * 0.3 / (4 * 13.0))


@pytest.fixture
def record(acceptance_log):
    def _record(tag, ok, detail):
        acceptance_log.append(f"{tag}: {'PASS' if ok else 'FAIL'} ({detail})")
        return ok
    return _record


def test_a1_unitarity(fig2_full, fig3_full, record):
    d2, d3 = fig2_full.meta["norm_drift"], fig3_full.meta["norm_drift"]
    ok = d2 <= 1e-8 and d3 <= 1e-8
    record("A1 unitarity", ok, f"fig2 drift {d2:.2e}, fig3 drift {d3:.2e}, tol 1e-8")
    assert ok


def test_a2_stark_and_resonance(fig2_params, record):
    delta = static_stark_shift(fig2_params)
    info = detect_resonance(fig2_params)
    ok = (abs(delta - 0.00615) <= 1e-5 and abs(1.99445 + delta - 2.0006) <= 1e-4
          and info.order_p == 2)
    record("A2 Stark shift", ok, f"Delta {delta:.7f}, omega31+Delta {1.99445 + delta:.6f}, "
           f"P {info.order_p}")
    assert ok


def test_a3_intermediate_suppression(fig2_full, record):
    m = float(np.max(fig2_full.population("b2")))
    ok = m <= 0.002
    record("A3 max |b2|^2", ok, f"{m:.5f} <= 0.002")
    assert ok


def test_a4_two_photon_period(fig2_full, record):
    t1 = first_transfer_time(fig2_full)
    rel = abs(t1 - HALF_RABI_FIG2) / HALF_RABI_FIG2
    ok = rel <= 0.10
    record("A4 Rabi period", ok, f"first transfer {t1:.2f} vs GRWA {HALF_RABI_FIG2:.2f} "
           f"cycles, {100 * rel:.1f}% <= 10%")
    assert ok


def _p5_over_p3(spec):
    return spec.power_at(5.0) / spec.power_at(3.0)


def test_a5_spectrum_structure(fig2_full, fig3_full, fig2_params, fig3_params, record):
    cfg = Scenario.load("fig2").spectrum
    spec2 = coherent_spectrum(induced_dipole(fig2_full, fig2_params), cfg["omega_max"])
    peaks = find_peaks(spec2, cfg["min_relative_height"], cfg["min_separation"])
    found = {h: any(abs(w - h) <= 0.05 for w, _ in peaks) for h in (1, 3, 5)}
    strongest = abs(peaks[0][0] - 1.0) <= 0.05
    spec3 = coherent_spectrum(induced_dipole(fig3_full, fig3_params), cfg["omega_max"])
    r2, r3 = _p5_over_p3(spec2), _p5_over_p3(spec3)
    ok = all(found.values()) and strongest and r3 > r2
    record("A5 spectrum", ok, f"lines {sorted(h for h, f in found.items() if f)}, "
           f"strongest {peaks[0][0]:.3f}, P5/P3 fig3 {r3:.2e} > fig2 {r2:.2e}")
    assert ok


def test_a6_convergence_in_omega21(record):
    doc = json.loads(json.dumps(BUILTIN["fig2"]))
    doc.update(t_end=200.0, lock_resonance=FIG2_LOCK, outputs=["populations"])
    doc["numerics"] = {"verify": False}
    base = Scenario.from_doc(doc)
    errs = []
    for w21 in (13.0, 19.0, 25.0, 50.0):
        sc = base.with_value("params.omega21", w21)
        rep = compare(sc, parse_solver("grwa-smallz"), parse_solver("full"))
        errs.append(rep["errors"]["pop_b3"]["rms"])
    ok = all(a > b for a, b in zip(errs, errs[1:]))
    record("A6 omega21 convergence", ok, "rms " + ", ".join(f"{e:.4f}" for e in errs))
    assert ok


def _riccati_rms(params, env, t_end):
    sol = riccati_solve(params, env, t_end, mode=Exact())
    ode = integrate_riccati(params, env, t_end, mode=Exact())["x"]
    good = np.isfinite(ode) & np.isfinite(sol.x)
    return float(np.sqrt(np.mean(np.abs(sol.x[good] - ode[good]) ** 2))), float(np.nanmax(sol.validity))


@pytest.mark.filterwarnings("ignore:omega21")
def test_a7_riccati_honesty(fig2_params, fig2_env, record):
    rms_in, val_in = _riccati_rms(fig2_params, fig2_env, 40.0)
    strong = Scenario.load("strong")
    rms_out, val_out = _riccati_rms(strong.system_params(), strong.envelope(), strong.t_end)
    ok = rms_in <= 0.05 and val_in <= 0.1 and val_out >= 0.5 and rms_out >= 5 * rms_in
    record("A7 Riccati", ok, f"fig2 rms {rms_in:.4f} validity {val_in:.1e}; out-of-regime "
           f"rms {rms_out:.3f} validity {val_out:.2f}")
    assert ok


def test_a8_grwa_floquet_identity(fig2_params, fig2_env, record):
    t = np.linspace(0.0, 400.0, 8001)
    g1, g3 = grwa_amplitudes(fig2_params, fig2_env, t, rabi_form="smallz")
    f1, f3 = floquet_amplitudes(fig2_params, fig2_env, t)
    err = max(np.max(np.abs(np.abs(g1) - np.abs(f1))), np.max(np.abs(np.abs(g3) - np.abs(f3))))
    ok = err <= 1e-12
    record("A8 GRWA/Floquet", ok, f"max modulus gap {err:.1e} <= 1e-12")
    assert ok


def test_a9_ratio_oracle(fig2_full, fig2_params, fig2_env, record):
    rat = integrate_ratios(fig2_params, fig2_env, 400.0, samples_per_cycle=40, truncate=True)
    n = len(rat.t)
    b1, b2, b3 = (fig2_full[k][:n] for k in ("b1", "b2", "b3"))
    keep = np.abs(b1) >= 0.1
    err = max(np.max(np.abs(rat["r"][keep] - (b2 / b1)[keep])),
              np.max(np.abs(rat["rho"][keep] - (b3 / b1)[keep])))
    ok = err <= 1e-5
    record("A9 ratio oracle", ok, f"sup error {err:.1e} on |b1| >= 0.1 (tol 1e-5)")
    assert ok


_A10_FAIL = []


@settings(max_examples=300, deadline=None)
@given(st.floats(1e-3, 20.0), st.integers(1, 15))
def _a10_invariants(z, n):
    rec = abs(jn(n - 1, z) + jn(n + 1, z) - 2 * n / z * jn(n, z))
    par = abs(jn(n, -z) - (-1) ** n * jn(n, z))
    k = np.arange(1, int(z) + 40)
    norm = abs(jn(0, z) ** 2 + 2 * sum(jn(int(j), z) ** 2 for j in k) - 1)
    if max(rec, par, norm) > 1e-10:
        _A10_FAIL.append((z, n, rec, par, norm))


def test_a10_bessel_layer(record):
    _a10_invariants()
    zs = np.linspace(-0.01, 0.01, 201)
    small = max(abs(bessel_j_small(n, z) - jn(n, z)) for n in range(1, 6) for z in zs)
    j0_gap = max(abs(bessel_j_small(0, z) - jn(0, z)) for z in zs)
    ok = not _A10_FAIL and small <= 1e-6 and j0_gap <= 0.01 ** 2 / 4 * 1.01
    record("A10 Bessel", ok, f"{len(_A10_FAIL)} invariant failures at 1e-10; small-z gap "
           f"{small:.1e} (n >= 1), J0 gap {j0_gap:.1e} = z^2/4 truncation")
    assert ok
