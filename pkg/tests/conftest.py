import numpy as np
import pytest
from hypothesis import strategies as st

from gresilience.game import P2ScaleMode, SystemFactors, build_bimatrix

REF_FACTORS = SystemFactors(t_h=5, t_a=2, h=1, co2=3)
REF_EPS = 0.8


@pytest.fixture
def ref_factors():
    return REF_FACTORS


@pytest.fixture
def ref_bimatrix():
    return build_bimatrix(REF_FACTORS, REF_EPS, P2ScaleMode.COMPLEMENT)


def random_factors(rng: np.random.Generator, n: int):
    """Valid factor tuples and confidences spanning several orders of magnitude."""
    out = []
    for _ in range(n):
        t_h, t_a, h, co2 = 10.0 ** rng.uniform(-3, 2, size=4)
        if rng.random() < 0.1:
            t_h = 0.0
        if rng.random() < 0.1:
            co2 = 0.0
        eps = float(rng.uniform(1e-3, 1 - 1e-3))
        out.append((SystemFactors(t_h, t_a, h, co2), eps))
    return out


positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)
nonneg = st.floats(min_value=0.0, max_value=1e3, allow_nan=False, allow_infinity=False)
confidence = st.floats(min_value=1e-3, max_value=1 - 1e-3)
factors_st = st.builds(SystemFactors, t_h=nonneg, t_a=positive, h=positive, co2=nonneg)
scale_st = st.sampled_from(list(P2ScaleMode))


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: exit criterion from the acceptance list")


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" in rep.nodeid and rep.when == "call":
                name = rep.nodeid.split("::")[-1]
                lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, verdict in lines:
            terminalreporter.write_line(f"{verdict}  {name}")
