import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import exact_maps, mobius
from juliatwin.errors import DegreeBudgetError, MapFormatError
from juliatwin.poly import Poly
from juliatwin.scalars import QI
from juliatwin.ratmap import (RatMap, SpherePoint, chebyshev, compose, critical_points, derivative,
                              evaluate, example_pair, iterate, maps_equal, mobius_conjugate, parse_map,
                              power_map)


def m(text):
    return parse_map(text)


def chebyshev_oracle(d):
    # three-term recurrence T_{d+1} = 2 z T_d - T_{d-1}, built on plain Polys
    z = Poly([0, 1], True)
    a, b = Poly([1], True), z
    for _ in range(d - 1):
        a, b = b, z * b * 2 - a
    return RatMap(b if d else a)


# evaluate

def test_evaluate_examples():
    assert evaluate(m("z^2"), SpherePoint.infinity(True)).is_infinite
    assert evaluate(m("1/z"), 0).is_infinite
    assert complex(evaluate(m("(z^2-1)/z"), 2).value) == 1.5
    assert str(evaluate(m("(z^2-1)/z"), 2)) == "3/2"


def test_sphere_point_normalization_and_distance():
    p = SpherePoint.of(3 + 4j)
    assert max(abs(p.z0), abs(p.z1)) == pytest.approx(1)
    assert p.distance(p) == 0
    # chord on the unit sphere: 0 and infinity are antipodal
    assert SpherePoint.of(0).distance(SpherePoint.infinity()) == pytest.approx(2)
    assert SpherePoint.of(1).distance(SpherePoint.of(1j)) == pytest.approx(math.sqrt(2))


# compose / iterate

def test_compose_examples():
    assert maps_equal(compose(m("z^2"), m("z^3")), m("z^6"))
    assert maps_equal(compose(chebyshev(2), chebyshev(3)), chebyshev_oracle(6))
    assert maps_equal(compose(m("1/z"), m("1/z")), m("z"))


def test_iterate_examples():
    assert maps_equal(iterate(m("z^2"), 3), m("z^8"))
    assert maps_equal(iterate(m("2z+z^2"), 0), RatMap.identity())
    assert iterate(m("2z+z^2"), 2) == m("4z + 6z^2 + 4z^3 + z^4")


def test_iterate_budget():
    with pytest.raises(DegreeBudgetError):
        iterate(m("z^2"), 13, budget=4096)


@given(exact_maps(), exact_maps())
def test_compose_degree_multiplies(f, g):
    assert compose(f, g).degree == f.degree * g.degree


@given(exact_maps(max_deg=2), st.integers(0, 3))
def test_iterate_recursion(f, k):
    assert iterate(f, k + 1) == compose(f, iterate(f, k))


# derivative / conjugation

def test_derivative_examples():
    assert derivative(m("z^2")) == m("2z")
    assert maps_equal(derivative(m("1/z")), m("-1/z^2"))
    assert derivative(chebyshev(3)) == m("12z^2 - 3")


def test_mobius_conjugate_examples():
    # sigma f sigma^-1 with sigma = 2z: 2 * ((z/2)^2 - 2)
    assert maps_equal(mobius_conjugate(m("z^2-2"), m("2z")), compose(m("2z"), compose(m("z^2-2"), m("z/2"))))
    assert maps_equal(mobius_conjugate(m("z^2-2"), m("2z")), m("z^2/2 - 4"))
    assert maps_equal(mobius_conjugate(m("z^2"), m("z")), m("z^2"))
    assert maps_equal(mobius_conjugate(m("z^2"), m("1/z")), m("z^2"))


@given(exact_maps(max_deg=2), mobius())
def test_conjugation_preserves_degree(f, s):
    assert mobius_conjugate(f, s).degree == f.degree


# maps_equal

def test_maps_equal_examples():
    assert maps_equal(RatMap(Poly([0, 0, 1])), RatMap(Poly([0, 0, 2]), Poly([2])))
    assert not maps_equal(m("z^2"), m("z^3"))
    f, g = example_pair(m("z^2+1"), 2, -1)
    assert maps_equal(compose(f, g), iterate(f, 2))


@given(exact_maps(), exact_maps(), st.integers(1, 5))
def test_maps_equal_equivalence_and_scaling(f, g, c):
    assert maps_equal(f, f)
    assert maps_equal(f, g) == maps_equal(g, f)
    scaled = RatMap(f.num.scale(c), f.den.scale(c))
    assert maps_equal(f, scaled)


def test_maps_equal_float_tolerance():
    f = m("z^2+1").to_float()
    g = RatMap(Poly([1 + 1e-12, 0, 1], False))
    assert maps_equal(f, g)
    assert not maps_equal(f, RatMap(Poly([1.001, 0, 1], False)))


# constructors

def test_constructors():
    assert chebyshev(2) == m("2z^2-1")
    assert chebyshev(2, -1) == m("-2z^2+1")
    x = 0.7
    assert complex(chebyshev(3).to_float()(math.cos(x))).real == pytest.approx(math.cos(3 * x), abs=1e-12)
    f, g = example_pair(m("z^2+1"), 2, -1)
    assert f == m("z^4+1") and g == m("-z^4-1")
    assert maps_equal(power_map(1j, 3), m("i z^3").to_float())
    assert power_map(QI(0, 1), 3) == m("i z^3")


@pytest.mark.parametrize("a", range(2, 6))
@pytest.mark.parametrize("b", range(2, 6))
def test_chebyshev_semigroup(a, b):
    assert compose(chebyshev(a), chebyshev(b)) == chebyshev(a * b)
    assert chebyshev(a) == chebyshev_oracle(a)


# critical points

def _crit_set(f):
    out = [("inf" if p.is_infinite else complex(round(p.value.real, 6), round(p.value.imag, 6)), k)
           for p, k in critical_points(f)]
    return dict(out)


def test_critical_point_examples():
    assert _crit_set(m("z^2")) == {0j: 1, "inf": 1}
    assert _crit_set(chebyshev(3)) == {-0.5: 1, 0.5: 1, "inf": 2}
    assert _crit_set(m("1/z^2")) == {0j: 1, "inf": 1}


@given(exact_maps(min_deg=2))
def test_critical_multiplicity_sum(f):
    assert sum(k for _, k in critical_points(f)) == 2 * f.degree - 2


# parsing

@pytest.mark.parametrize("text,expected", [
    ("2z^2-1", "2*z**2 - 1"),
    ("(z+1)(z-1)", "z**2 - 1"),
    ("1e-3z", "z/1000"),
    ("0.5+2j", "1/2 + 2*i"),
])
def test_parse_implicit_products(text, expected):
    assert parse_map(text) == parse_map(expected)


@pytest.mark.parametrize("bad", ["", "z^2 +* 1", "sin(z)", "z/0", "import os"])
def test_parse_rejects(bad):
    with pytest.raises(MapFormatError):
        parse_map(bad)


def test_float_map_vectorized_call():
    f = m("z^2+i").to_float()
    z = np.array([0, 1, 1j])
    assert np.allclose(f(z), z ** 2 + 1j)
    assert cmath.isclose(complex(f(2)), 4 + 1j)
