from fractions import Fraction

import hypothesis.strategies as st
from hypothesis import HealthCheck, assume, settings

from juliatwin.poly import Poly
from juliatwin.ratmap import RatMap
from juliatwin.scalars import QI

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.large_base_example, HealthCheck.too_slow])
settings.load_profile("default")

gauss = st.builds(lambda a, b: QI(Fraction(a), Fraction(b)), st.integers(-4, 4), st.integers(-2, 2))


@st.composite
def exact_maps(draw, max_deg=3, min_deg=1):
    """Random exact rational maps with small Gaussian-integer coefficients."""
    num = draw(st.lists(gauss, min_size=1, max_size=max_deg + 1))
    den = draw(st.lists(gauss, min_size=1, max_size=max_deg + 1))
    assume(any(c != 0 for c in den))
    f = RatMap(Poly(num, True), Poly(den, True))
    assume(min_deg <= f.degree <= max_deg)
    return f


@st.composite
def mobius(draw):
    a, b, c, d = (draw(gauss) for _ in range(4))
    assume(a * d - b * c != 0)
    return RatMap(Poly([b, a], True), Poly([d, c], True))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
