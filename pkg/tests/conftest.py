import math

import pytest

from dtebell.params import DteParams

LI6_MASS = 9.988e-27
LI6_V_REL = 2e-2

ACCEPTANCE_LINES: list[str] = []


def li_params(T_cm=2.0, T_rel=2.0, tau=1.0, phi_tau=0.0):
    return DteParams.from_dispersion_times(LI6_MASS, LI6_V_REL, T_cm=T_cm, T_rel=T_rel, tau=tau, phi_tau=phi_tau)


@pytest.fixture
def li():
    """tau = 1 s, (v_rel/2) tau = 1 cm, tau/T_cm = tau/T_rel = 0.5."""
    return li_params()


@pytest.fixture
def ideal():
    """Essentially dispersion-free pair: huge dispersion times, tau = 0."""
    return li_params(T_cm=1e6, T_rel=1e6, tau=0.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
