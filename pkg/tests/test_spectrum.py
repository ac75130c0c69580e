import cmath

import numpy as np
import pytest
from hypothesis import given

from conftest import mobius
from juliatwin.errors import DegreeBudgetError
from juliatwin.julia import inverse_iteration_sample
from juliatwin.ratmap import chebyshev, evaluate, mobius_conjugate, parse_map
from juliatwin.spectrum import (classify_multiplier, critical_orbit_report, cycle_multiplier,
                                fixed_point_count, nonrepelling_census, periodic_points)


def _pt(p):
    if p.is_infinite:
        return "inf"
    z = complex(p.value)
    return complex(round(z.real, 9) + 0.0, round(z.imag, 9) + 0.0)


def test_classify_multiplier_examples():
    assert classify_multiplier(2).kind == "repelling"
    assert classify_multiplier(0).kind == "superattracting"
    assert classify_multiplier(0.5j).kind == "attracting"
    c = classify_multiplier(cmath.exp(2j * cmath.pi / 3))
    assert (c.kind, c.q) == ("rationally_indifferent", 3)
    assert str(c) == "rationally_indifferent(3)"
    assert classify_multiplier(cmath.exp(2j * cmath.pi * 0.6180339887)).kind == "irrationally_indifferent"


def test_z2_period_one():
    recs = periodic_points(parse_map("z^2"), 1)
    got = {str(_pt(r.points[0])): (r.cls.kind, r.multiplier) for r in recs}
    assert set(got) == {"0j", "(1+0j)", "inf"}
    assert got["0j"][0] == "superattracting" and got["inf"][0] == "superattracting"
    assert got["(1+0j)"][0] == "repelling"
    assert got["(1+0j)"][1] == pytest.approx(2)
    assert fixed_point_count(recs) == 3


def test_z2_period_two_adds_three_cycle_roots():
    recs = periodic_points(parse_map("z^2"), 2)
    two = [r for r in recs if r.period == 2]
    assert len(two) == 1 and len(recs) == 4
    pts = sorted(complex(p.value).imag for p in two[0].points)
    assert pts == pytest.approx([-np.sqrt(3) / 2, np.sqrt(3) / 2])
    assert two[0].multiplier == pytest.approx(4)
    assert fixed_point_count(recs) == 5


def test_orbit_points_cycle_under_f():
    f = parse_map("z^2-1+0.3i")
    for r in periodic_points(f, 3):
        assert len(r.points) == r.period
        for a, b in zip(r.points, r.points[1:] + r.points[:1]):
            assert evaluate(f.to_float(), a).distance(b) < 1e-8


@pytest.mark.parametrize("text", ["z^2", "4z^3-3z", "z^2-2", "(z^2+1)/(z-2)", "z^3+0.4i"])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_weighted_count_is_d_n_plus_one(text, n):
    f = parse_map(text)
    recs = periodic_points(f, n)
    assert fixed_point_count(recs) == f.degree ** n + 1
    assert max(r.residual for r in recs) < 1e-8


def test_parabolic_multiplicity():
    recs = periodic_points(parse_map("z^2+1/4"), 1)
    half = [r for r in recs if not r.points[0].is_infinite][0]
    assert half.multiplicity == 2
    assert complex(half.points[0].value) == pytest.approx(0.5, abs=1e-6)
    assert str(half.cls) == "rationally_indifferent(1)"


def test_budget_error():
    with pytest.raises(DegreeBudgetError):
        periodic_points(parse_map("z^2"), 13)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_power_map_cycles_on_circle_repel(n):
    for r in periodic_points(parse_map("z^3"), n):
        p = r.points[0]
        if not p.is_infinite and abs(p.value) > 0.5:
            assert abs(r.multiplier) == pytest.approx(3 ** r.period, rel=1e-9)
            assert r.cls.kind == "repelling"


def test_multiplier_invariant_under_rotation():
    f = parse_map("z^2-1+0.3i")
    for r in periodic_points(f, 3):
        if r.period < 2:
            continue
        z0 = np.array([p.z0 for p in r.points])
        z1 = np.array([p.z1 for p in r.points])
        base = cycle_multiplier(f, z0, z1)
        for s in range(1, r.period):
            assert abs(cycle_multiplier(f, np.roll(z0, s), np.roll(z1, s)) - base) < 1e-9


def _signature(f, n):
    return sorted((r.period, round(abs(r.multiplier), 5), r.cls.kind) for r in periodic_points(f, n))


@given(mobius())
def test_multipliers_are_conjugacy_invariant(s):
    f = parse_map("z^2-1+0.3i")
    g = mobius_conjugate(f, s)
    assert _signature(g, 2) == _signature(f, 2)


def test_census():
    rep = nonrepelling_census(parse_map("z^2"), 4)
    assert rep["nonrepelling_constant"]
    assert [row["counts"].get("repelling", 0) for row in rep["per_period"]] == [1, 2, 3, 5]  # orbits of period dividing n
    assert all(row["weighted_points"] == 2 ** row["n"] + 1 for row in rep["per_period"])
    assert nonrepelling_census(chebyshev(3), 3)["nonrepelling_constant"]


@pytest.mark.parametrize("text,status,ok", [
    ("z^2", "fatou", True),
    ("z^2-2", "preperiodic_repelling", True),
    ("z^2+1/4", "unknown", None),
])
def test_critical_orbit_report(text, status, ok):
    f = parse_map(text)
    cloud = inverse_iteration_sample(f, 4000, seed=1)
    rep = critical_orbit_report(f, cloud)
    finite = [c for c in rep["critical_points"] if c["point"] != "inf"]
    assert finite[0]["status"] == status
    assert rep["hypothesis_satisfied"] is ok
