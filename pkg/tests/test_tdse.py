import numpy as np
from hypothesis import given, settings, strategies as st
import pytest
from scipy.integrate import solve_ivp

from lambdarabi.errors import IntegratorError, SingularityError
from lambdarabi.model import SineRampFlat, SystemParams, instantaneous_rabi
from lambdarabi.tdse import integrate_full, integrate_ratios, norm

TWO_PI = 2 * np.pi


def _scipy_full(params, env, t_end, t_eval):
    def rhs(tau, y):
        b1, b2, b3 = y[:3] + 1j * y[3:]
        w, m = instantaneous_rabi(params, env, tau / TWO_PI)
        d = np.array([1j * w * b2,
                      -1j * (params.omega21 * b2 - w * b1 - m * b3),
                      -1j * (params.omega31 * b3 - m * b2)])
        return np.concatenate([d.real, d.imag])

    y0 = np.array([1, 0, 0, 0, 0, 0], dtype=float)
    sol = solve_ivp(rhs, (0, TWO_PI * t_end), y0, method="DOP853", rtol=1e-12, atol=1e-13,
                    t_eval=np.minimum(TWO_PI * np.asarray(t_eval), TWO_PI * t_end))
    return sol.y[:3] + 1j * sol.y[3:]


def test_matches_scipy_reference(fig2_params, fig2_env):
    ts = integrate_full(fig2_params, fig2_env, 10.0, verify=False)
    ref = _scipy_full(fig2_params, fig2_env, 10.0, ts.t)
    for k, name in enumerate(("b1", "b2", "b3")):
        assert np.max(np.abs(ts[name] - ref[k])) < 1e-8


def test_matches_scipy_sine_carrier():
    p = SystemParams(13, 1.99445, 0.5, 0.3, carrier="sin")
    env = SineRampFlat(2.0)
    ts = integrate_full(p, env, 6.0, verify=False)
    ref = _scipy_full(p, env, 6.0, ts.t)
    assert np.max(np.abs(ts["b3"] - ref[2])) < 1e-8


def test_zero_field_stays_put():
    ts = integrate_full(SystemParams(13, 2, 0.0, 0.0), SineRampFlat(4), 20.0)
    assert np.all(ts["b1"] == 1.0)
    assert np.all(ts["b2"] == 0) and np.all(ts["b3"] == 0)
    assert ts.meta["norm_drift"] == 0.0


def test_norm_and_halving(fig2_full):
    assert fig2_full.meta["norm_drift"] <= 1e-8
    assert fig2_full.meta["halving_delta"] <= 1e-6
    assert norm((fig2_full["b1"][-1], fig2_full["b2"][-1], fig2_full["b3"][-1])) == pytest.approx(1, abs=1e-8)


def test_sampling_grid(fig2_full):
    assert fig2_full.t[0] == 0 and fig2_full.t[-1] == pytest.approx(400.0)
    assert len(fig2_full.t) == 400 * 40 + 1


@pytest.mark.filterwarnings("ignore:omega21")
def test_coarse_step_raises():
    p = SystemParams(5, 0.3, 2.0, 2.0)
    with pytest.raises(IntegratorError) as exc:
        integrate_full(p, SineRampFlat(4), 40.0, steps_per_cycle=100, verify=False)
    assert exc.value.report["norm_drift"] > 1e-6


def test_rejects_tiny_step_count(fig2_params, fig2_env):
    with pytest.raises(ValueError):
        integrate_full(fig2_params, fig2_env, 1.0, steps_per_cycle=50)


def test_ratios_consistent_with_full(fig2_params, fig2_env):
    full = integrate_full(fig2_params, fig2_env, 30.0, verify=False)
    rat = integrate_ratios(fig2_params, fig2_env, 30.0)
    assert np.max(np.abs(rat["r"] - full["b2"] / full["b1"])) < 1e-8
    assert np.max(np.abs(rat["rho"] - full["b3"] / full["b1"])) < 1e-8


def test_ratio_blowup(fig2_params, fig2_env):
    with pytest.raises(SingularityError) as exc:
        integrate_ratios(fig2_params, fig2_env, 120.0, blowup=5.0)
    t_hit = exc.value.report["blowup_time"]
    assert 60.0 < t_hit < 100.0
    ts = integrate_ratios(fig2_params, fig2_env, 120.0, blowup=5.0, truncate=True)
    assert ts.meta["blowup_time"] == pytest.approx(t_hit)
    assert ts.t[-1] <= t_hit
    assert np.all(np.isfinite(ts["rho"]))


@settings(max_examples=25, deadline=None)
@given(st.floats(10, 30), st.floats(-4, 4), st.floats(0, 1), st.floats(0, 1),
       st.sampled_from(["cos", "sin"]))
def test_unitarity_property(w21, w31, a, b, carrier):
    p = SystemParams(w21, w31, a, b, carrier=carrier)
    ts = integrate_full(p, SineRampFlat(1.0), 5.0, verify=False)
    assert ts.meta["norm_drift"] <= 1e-8
