import os

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from plasmonsr import EmitterParams

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

pumps = st.floats(1e-3, 1e4)
tb_ratios = st.floats(0.01, 2.0)
dephasings = st.floats(0.0, 20.0)
# physical region of the closed forms: gamma tau_b below the inversion bound
gamma_tbs = st.floats(1e-3, 0.99)


@st.composite
def emitters(draw, pump=pumps, tb=tb_ratios, deph=dephasings):
    return EmitterParams.dimensionless(draw(pump), draw(tb), draw(deph))


@pytest.fixture
def ref_point():
    return EmitterParams.dimensionless(1.0, 0.1)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
