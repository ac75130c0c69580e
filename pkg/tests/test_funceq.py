import pytest
from hypothesis import given
from hypothesis import strategies as st

from juliatwin.errors import DegreeBudgetError
from juliatwin.funceq import (commute_check, compose_word, degree_identity,
                              search_functional_equation)
from juliatwin.ratmap import chebyshev, compose, example_pair, iterate, maps_equal, parse_map
from juliatwin.scalars import QI


@pytest.fixture(scope="module")
def ex1():
    return example_pair(parse_map("z^2+1"), 2, -1)


def test_compose_word_examples(ex1):
    f, g = ex1
    assert maps_equal(compose_word(f, g, [1]), iterate(f, 2))
    assert compose_word(f, g, [0]) == g
    assert compose_word(parse_map("z^2"), parse_map("z^3"), [1, 0]) == parse_map("z^18")


def test_compose_word_budget():
    with pytest.raises(DegreeBudgetError):
        compose_word(parse_map("z^2"), parse_map("z^3"), [5, 5], budget=4096)


def test_commute_examples(ex1):
    assert commute_check(chebyshev(2), chebyshev(3))
    assert commute_check(parse_map("z^2"), parse_map("z^3"))
    assert not commute_check(*ex1)


def test_rotated_power_maps_commute_when_constructed():
    # i z^2 and -z^3 satisfy lam1^(d2-1) = lam2^(d1-1); both orders give i z^6
    f, g = parse_map("i z^2"), parse_map("-z^3")
    assert compose(f, g) == parse_map("i z^6")
    assert maps_equal(compose(f, g), compose(g, f))
    assert commute_check(f, g)
    assert not commute_check(f, parse_map("-i z^3"))


def test_search_example_pair(ex1):
    rep = search_functional_equation(*ex1)
    w = rep.witness
    assert (w.k, w.exponents, w.m, w.certified) == (1, (1,), 2, True)
    assert rep.to_dict()["witness"] == {"k": 1, "exponents": [1], "m": 2, "certified": True,
                                       "word_degree": 16}


def test_search_iterate_coincidence():
    w = search_functional_equation(parse_map("z^2"), parse_map("z^4")).witness
    assert (w.exponents, w.m) == ((0,), 2)


def test_search_none_for_coprime_degrees():
    rep = search_functional_equation(parse_map("z^2"), parse_map("z^3"), max_m=6)
    assert rep.witness is None
    # 2^s 3^k = 2^m never holds, so no composition was ever attempted
    assert rep.certified_checks == 0 and rep.candidates > 0


def test_search_log_respects_degree_identity(ex1):
    f, g = ex1
    rep = search_functional_equation(f, chebyshev(4), max_m=4)
    composed = [e for e in rep.log if "exponents" in e]
    assert composed
    for e in composed:
        assert degree_identity(f.degree, 4, e["exponents"], e["m"])
    # and every tuple passing the identity was composed
    assert len(composed) == rep.certified_checks


@given(st.integers(2, 6), st.integers(2, 8))
def test_witness_stable_under_larger_budgets(m, extra):
    f, g = example_pair(parse_map("z^2+1"), 2, -1)
    small = search_functional_equation(f, g, max_m=m, max_k=1)
    big = search_functional_equation(f, g, max_m=m + extra, max_k=3, degree_budget=4096 * 4)
    assert small.witness == big.witness


def test_float_inputs_are_rationalized():
    f, g = example_pair(parse_map("z^2+1"), 2, -1)
    w = search_functional_equation(f.to_float(), g.to_float()).witness
    assert (w.exponents, w.m) == ((1,), 2)


def test_degree_one_rejected():
    with pytest.raises(ValueError):
        search_functional_equation(parse_map("z+1"), parse_map("z^2"))


def test_gauss_coefficients_exact():
    a = QI(0, 1)
    f = parse_map("z^2")
    g = parse_map("-z^2")
    # f g = z^4 = f^2 with a unit that squares away
    assert search_functional_equation(f, g).witness.exponents == (1,)
    assert a * a == QI(-1, 0)
