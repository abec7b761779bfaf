import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lambdarabi.errors import DomainError
from lambdarabi.effective import (BesselTruncated, Exact, SlowOnly, adiabatic_b2,
                                  coupling_s, coupling_series, integrate_two_state,
                                  slow_rabi, slow_rabi_general, slow_rabi_smallz,
                                  with_adiabatic_b2)
from lambdarabi.model import SineRampFlat, SmoothSquaredExp, SystemParams, static_stark_shift
from lambdarabi.analytic import grwa_series
from lambdarabi.timegrid import TimeGrid


def _mp_slow_rabi(p, f2, P):
    # removable-singularity form evaluated with mpmath
    d = mpmath.mpf(static_stark_shift(p))
    z = d * f2 / 2
    n = P // 2
    core = mpmath.besselj(n, z) - (mpmath.besselj(n - 1, z) + mpmath.besselj(n + 1, z)) / 2
    return float((-1) ** n * p.rabi_omega * p.rabi_m / (2 * p.omega21) * f2 * core)


def test_slow_rabi_fig2_value(fig2_params):
    env = SineRampFlat(4)
    assert slow_rabi_general(fig2_params, env, 100.0, 2) == pytest.approx(0.0028757, abs=5e-8)
    assert slow_rabi_smallz(fig2_params, env, 100.0, 2) == pytest.approx(0.0028846, abs=5e-8)
    assert slow_rabi_smallz(fig2_params, env, 100.0, 4) == pytest.approx(-4.4379e-6, rel=1e-4)


@pytest.mark.parametrize("P", [0, 2, 4, 6, -2])
def test_slow_rabi_against_mpmath(fig3_params, P):
    for f2 in (0.1, 0.5, 1.0):
        got = slow_rabi(fig3_params, np.array([f2]), P)[0]
        assert got == pytest.approx(_mp_slow_rabi(fig3_params, f2, P), rel=1e-10, abs=1e-18)


def test_zero_stark_shift_limits():
    p = SystemParams(13, 2, 0.4, 0.4)
    env = SineRampFlat(4)
    assert slow_rabi_general(p, env, 10.0, 2) == pytest.approx(0.4 * 0.4 / (4 * 13))
    assert slow_rabi_general(p, env, 10.0, 4) == 0.0
    assert slow_rabi_general(p, env, 10.0, 0) == pytest.approx(0.4 * 0.4 / (2 * 13))


@settings(max_examples=50)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.sampled_from([2, 4, 6]))
def test_smallz_agrees_at_small_argument(a, b, P):
    p = SystemParams(50, 2, a, b)
    z = abs(static_stark_shift(p)) / 2
    if z > 0.01 or a * b == 0:
        return
    g = slow_rabi(p, np.array([1.0]), P)[0]
    s = slow_rabi(p, np.array([1.0]), P, "smallz")[0]
    assert abs(g - s) <= 0.01 * abs(s) + 1e-300


def test_odd_order_rejected(fig2_params, fig2_env):
    with pytest.raises(DomainError):
        slow_rabi_general(fig2_params, fig2_env, 10.0, 3)
    with pytest.raises(DomainError):
        SlowOnly(3)
    with pytest.raises(DomainError):
        slow_rabi_smallz(fig2_params, fig2_env, 10.0, -2)


def test_bessel_matches_exact(fig2_params, fig2_env):
    grid = TimeGrid(30.0, 400, 20)
    ex = coupling_series(fig2_params, fig2_env, grid, Exact())
    bt = coupling_series(fig2_params, fig2_env, grid, BesselTruncated())
    assert np.max(np.abs(ex - bt)) < 1e-12


def test_bessel_truncation_too_small(fig2_params, fig2_env):
    with pytest.raises(DomainError):
        coupling_series(fig2_params, fig2_env, TimeGrid(1.0, 400, 20), BesselTruncated(2))


def test_exact_coupling_direct_formula(fig2_params, fig2_env):
    # at an integer cycle, cos^2 = 1 and f = 1
    s = coupling_s(fig2_params, fig2_env, 10.0, Exact(exact_phase=True))
    assert abs(s) == pytest.approx(0.5 * 0.3 / 13, rel=1e-12)
    assert coupling_s(fig2_params, fig2_env, 0.0, Exact()) == 0


def test_adiabatic_b2_tracks_full(fig2_full, fig2_params, fig2_env):
    # residual is the fast omega21 oscillation, O(omega0 / omega21) relative
    approx = adiabatic_b2(fig2_params, fig2_env, fig2_full["b1"], fig2_full["b3"], fig2_full.t)
    err = np.max(np.abs(approx - fig2_full["b2"]))
    assert err < 2.0 / 13.0 * np.max(np.abs(fig2_full["b2"]))


def test_two_state_exact_short_window(fig2_full, fig2_params, fig2_env):
    ts = integrate_two_state(fig2_params, fig2_env, 20.0, mode=Exact(), samples_per_cycle=40)
    assert ts.meta["norm_drift"] < 1e-8
    ref = fig2_full["b3"][: len(ts.t)]
    assert np.max(np.abs(ts["b3"] - ref)) < 0.05


def test_two_state_error_shrinks_with_omega21(fig3_env):
    from lambdarabi.tdse import integrate_full
    errs = []
    for w21 in (19.0, 50.0):
        p = SystemParams(w21, 2.0, 0.8, 0.7)
        full = integrate_full(p, fig3_env, 200.0, verify=False)
        eff = integrate_two_state(p, fig3_env, 200.0, mode=Exact())
        errs.append(np.sqrt(np.mean((np.abs(eff["b3"]) ** 2 - full.population("b3")) ** 2)))
    assert errs[1] < 0.5 * errs[0]


def test_two_state_slow_equals_grwa(fig3_params, fig3_env):
    ts = integrate_two_state(fig3_params, fig3_env, 100.0, mode=SlowOnly(2))
    g = grwa_series(fig3_params, fig3_env, 100.0, P=2, averaged_phases=False, check=False)
    assert np.max(np.abs(ts["b3"] - g["b3"])) < 1e-9
    assert np.max(np.abs(ts["b1"] - g["b1"])) < 1e-9


def test_with_adiabatic_b2_orders_columns(fig3_params, fig3_env):
    ts = integrate_two_state(fig3_params, fig3_env, 5.0, mode=SlowOnly(2))
    out = with_adiabatic_b2(ts, fig3_params, fig3_env)
    assert list(out.data)[:3] == ["b1", "b2", "b3"]
    assert "u" in out
