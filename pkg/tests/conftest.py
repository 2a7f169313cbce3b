import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from fran_ndt.core import SystemParams

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def rationals(lo=0, hi=1, max_den=12):
    """Rationals in [lo, hi] with small denominators."""
    return st.integers(1, max_den).flatmap(
        lambda d: st.integers(int(lo * d), int(hi * d)).map(lambda n: Fraction(n, d)))


@st.composite
def system_params(draw, max_m=6, max_k=6, positive_r=True, r_max=4):
    M = draw(st.integers(1, max_m))
    K = draw(st.integers(1, max_k))
    mu = draw(rationals(0, 1))
    r = draw(rationals(0, r_max))
    if positive_r and r == 0:
        r = Fraction(1, 7)
    if not positive_r and r == 0 and mu * M < 1:
        mu = Fraction(1, M)
    return SystemParams(M, K, K, mu, r)


def random_tuples(n, seed, max_mk=8, r_max=4, max_den=12):
    """Seeded grid of (M, K, mu, r) with r > 0."""
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        M, K = rng.randint(1, max_mk), rng.randint(1, max_mk)
        d = rng.randint(1, max_den)
        e = rng.randint(1, max_den)
        out.append(SystemParams(M, K, K, Fraction(rng.randint(0, d), d),
                                Fraction(rng.randint(1, r_max * e), e)))
    return out


@pytest.fixture
def P():
    return SystemParams.make


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
