import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haargroups.groups import (
    COMPACT,
    LOCALLY_COMPACT,
    PROBABILITY,
    Carrier,
    InvalidDimension,
    PointOutsideCarrier,
    base_circle,
    base_group,
    base_real_line,
    base_real_n,
    circle_shift,
)
from haargroups.intervals import IntervalSet
from haargroups.measure import integrate


def test_real_line():
    g, m = base_real_line()
    assert g.op(2, 3) == 5
    assert g.identity == 0
    assert integrate(m, IntervalSet.of((0, 4))) == 4
    assert g.tags.abelian and g.tags.compactness == LOCALLY_COMPACT and g.tags.dense_in_itself


def test_circle():
    g, m = base_circle()
    assert g.op(0.75, 0.5) == 0.25
    assert g.invert(0.25) == 0.75
    assert g.invert(0.0) == 0.0
    assert integrate(m, IntervalSet.of((0, 1))) == 1.0
    assert m.mass_class == PROBABILITY and g.tags.compactness == COMPACT


def test_real_n():
    g, _ = base_real_n(2)
    assert g.op((1, 1), (2, 2)) == (3, 3)
    assert g.metric((0, 0), (3, 4)) == 5
    assert base_real_n(3)[0].identity == (0.0, 0.0, 0.0)
    with pytest.raises(InvalidDimension):
        base_real_n(0)


def test_base_group_names():
    assert base_group("real-line")[0].name == "real-line"
    assert base_group("circle")[0].name == "circle"
    assert base_group("real-n:4")[0].carrier.dim == 4
    with pytest.raises(KeyError):
        base_group("torus")
    with pytest.raises(InvalidDimension):
        base_group("real-n:x")


def test_carrier_checks():
    c = Carrier.interval(-1.0, 1.0)
    assert c.contains(0.5) and not c.contains(1.0) and not c.contains(-1.0)
    with pytest.raises(PointOutsideCarrier):
        c.check(2.0)
    assert Carrier.circle().contains(0.0) and not Carrier.circle().contains(1.0)
    with pytest.raises(ValueError):
        Carrier.interval(1.0, 1.0)


dyadic = st.integers(0, 2**20 - 1).map(lambda k: k / 2**20)


@settings(max_examples=300)
@given(dyadic, dyadic, dyadic)
def test_circle_associative_exactly_on_dyadics(x, y, z):
    g, _ = base_circle()
    assert g.op(g.op(x, y), z) == g.op(x, g.op(y, z))


@settings(max_examples=200)
@given(st.fractions(0, 1).filter(lambda q: q < 1), st.fractions(0, 1).filter(lambda q: q < 1))
def test_circle_matches_rational_arithmetic(p, q):
    g, _ = base_circle()
    exact = (p + q) % 1
    assert g.op(float(p), float(q)) == pytest.approx(float(exact), abs=1e-15) or \
        abs(g.op(float(p), float(q)) - float(exact)) > 1 - 1e-15


@pytest.mark.parametrize("name", ["real-line", "circle", "real-n:3"])
def test_triangle_inequality(name):
    g, _ = base_group(name)
    rng = np.random.default_rng(5)
    xs, ys, zs = (g.sample(rng, 1000) for _ in range(3))
    for x, y, z in zip(xs, ys, zs):
        assert g.metric(x, z) <= g.metric(x, y) + g.metric(y, z) + 1e-12


@settings(max_examples=200)
@given(st.floats(-100, 100), st.floats(0.001, 50), st.floats(-1e3, 1e3))
def test_line_measure_invariance(a, w, t):
    g, m = base_real_line()
    s = IntervalSet.of((a, a + w))
    moved = g.translate_set(s, t, 0.0)
    assert abs(moved.length - s.length) <= 1e-10 * max(1.0, abs(t) + abs(a))


@settings(max_examples=200)
@given(st.floats(0, 0.999), st.floats(0.001, 0.5), st.floats(0, 0.999))
def test_circle_shift_preserves_length(a, w, t):
    s = IntervalSet.of((a, min(a + w, 1.0)))
    moved = circle_shift(s, t)
    assert moved.length == pytest.approx(s.length, abs=1e-12)
    assert moved.within(0.0, 1.0)
