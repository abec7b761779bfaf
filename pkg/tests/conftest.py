import warnings

import pytest

from lambdarabi.model import SineRampFlat, SmoothSquaredExp, SystemParams
from lambdarabi.tdse import integrate_full

FIG2 = dict(omega21=13.0, omega31=1.99445, rabi_omega=0.5, rabi_m=0.3)
FIG3 = dict(omega21=19.0, omega31=2.0, rabi_omega=0.8, rabi_m=0.7)
FIG3C = dict(omega21=50.0, omega31=2.0, rabi_omega=0.8, rabi_m=0.7)


@pytest.fixture(autouse=True)
def _quiet_applicability():
    from lambdarabi.analytic import ApplicabilityWarning
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ApplicabilityWarning)
        yield


@pytest.fixture(scope="session")
def fig2_params():
    return SystemParams(**FIG2)


@pytest.fixture(scope="session")
def fig2_env():
    return SineRampFlat(4.0)


@pytest.fixture(scope="session")
def fig3_params():
    return SystemParams(**FIG3)


@pytest.fixture(scope="session")
def fig3_env():
    return SmoothSquaredExp(100.0)


@pytest.fixture(scope="session")
def fig2_full(fig2_params, fig2_env):
    """Full numeric fig2 run, 400 cycles, 40 samples per cycle."""
    return integrate_full(fig2_params, fig2_env, 400.0, samples_per_cycle=40, verify=True)


@pytest.fixture(scope="session")
def fig3_full(fig3_params, fig3_env):
    return integrate_full(fig3_params, fig3_env, 300.0, samples_per_cycle=40, verify=False)


_ACCEPTANCE = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
