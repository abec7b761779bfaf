import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lambdarabi.csvio import read_csv, write_csv
from lambdarabi.timegrid import TimeGrid, TimeSeries, cycles_to_tau, tau_to_cycles


def test_grid_geometry():
    g = TimeGrid(10.0, 400, 20)
    assert g.n_steps == 4000 and g.stride == 20
    assert len(g.tau_half) == 2 * g.n_steps + 1
    assert g.t_samples[-1] == pytest.approx(10.0)
    assert np.allclose(g.refined(2).tau_full, g.tau_half)


def test_samples_must_divide_steps():
    with pytest.raises(ValueError):
        TimeGrid(1.0, 400, 30)


@settings(max_examples=30)
@given(st.floats(0.5, 5.0), st.integers(1, 6))
def test_cumulative_polynomial_exact(t_end, deg):
    # Simpson is exact through cubics
    g = TimeGrid(t_end, 100, 10)
    tau = g.tau_half
    got = g.cumulative(tau ** min(deg, 3))
    ref = g.tau_full ** (min(deg, 3) + 1) / (min(deg, 3) + 1)
    assert np.allclose(got, ref, rtol=1e-12, atol=1e-12)


def test_cumulative_error_estimate_is_small_for_smooth():
    g = TimeGrid(5.0, 200, 10)
    y = np.sin(g.tau_half)
    assert g.cumulative_error(y) < 1e-8
    assert g.cumulative(y)[-1] == pytest.approx(1 - np.cos(g.tau_full[-1]), abs=1e-9)


def test_unit_conversion_round_trip():
    assert tau_to_cycles(cycles_to_tau(3.25)) == pytest.approx(3.25)


def test_timeseries_checks_grid():
    with pytest.raises(ValueError):
        TimeSeries(np.array([0.0, 1.0, 3.0]), {"b1": np.ones(3)}, 400, {})


def test_timeseries_columns():
    ts = TimeSeries(np.array([0.0, 0.5]), {"b1": np.array([1, 1j])}, 400, {})
    names, cols = ts.columns()
    assert names == ["t_cycles", "re_b1", "im_b1"]
    assert ts.population("b1").tolist() == [1.0, 1.0]


def test_csv_round_trip(tmp_path):
    rows = np.array([[0.0, 1.0 / 3.0], [1.0, -2.5e-17]])
    path = tmp_path / "x.csv"
    write_csv(path, ["a", "b"], rows, header_lines=["hello"])
    text = path.read_bytes()
    assert b"\r" not in text and text.startswith(b"# hello\n")
    assert "3.33333333333e-01" in text.decode()
    names, data = read_csv(path)
    assert names == ["a", "b"]
    assert np.allclose(data, rows, rtol=1e-11, atol=0)
