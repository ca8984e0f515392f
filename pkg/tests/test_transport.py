import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haargroups.groups import InvalidDimension, PointOutsideCarrier, base_circle, base_real_line
from haargroups.intervals import IntervalSet
from haargroups.measure import ConstructionError, exp_map, identity_map, integrate, velocity_map
from haargroups.transport import (
    DimensionMismatch,
    ShearMap,
    arctan_add,
    arctan_group,
    identity_group,
    log_group,
    one_dimensionality_certificate,
    shear_group,
    transport,
    transport_group,
    velocity_add,
    velocity_density,
    velocity_group,
)


def test_exp_transport_is_multiplication():
    base, _ = base_real_line()
    g = transport_group(base, exp_map())
    assert g.op(2.0, 3.0) == pytest.approx(6.0, rel=1e-15)
    assert g.identity == 1.0


def test_identity_transport():
    res = identity_group()
    assert res.group.op(2.0, 3.5) == 5.5
    assert res.group.metric(1.0, 4.0) == 3.0
    assert integrate(res.measure, IntervalSet.of((0, 2))) == 2.0


def test_velocity_examples():
    g = velocity_group(1.0).group
    assert g.op(0.5, 0.5) == pytest.approx(0.8, rel=1e-15)
    assert g.op(0.0, 0.3) == 0.3
    for v in (-0.9, -0.2, 0.4, 0.99):
        assert g.invert(v) == pytest.approx(-v, abs=1e-15)
    generic = velocity_group(1.0).generic
    assert generic.op(0.5, 0.5) == pytest.approx(0.8, rel=1e-14)


def test_velocity_density_is_the_stated_one():
    # scaled base measure makes the transported density exactly c²/(c² - t²)
    for c in (0.5, 1.0, 3.0):
        m = velocity_group(c).measure
        ts = np.linspace(-0.95 * c, 0.95 * c, 21)
        np.testing.assert_allclose(m.density(ts), velocity_density(c)(ts), rtol=1e-13)


@pytest.mark.parametrize("c", [0.5, 1.0, 3.0, 3e8])
def test_velocity_measure_of_half_range(c):
    m = velocity_group(c).measure
    assert integrate(m, IntervalSet.of((0, c / 2)), 1e-12 * c) == pytest.approx(c / 2 * math.log(3), rel=1e-12)


def test_velocity_group_carrier_checks():
    g = velocity_group(1.0).group
    with pytest.raises(PointOutsideCarrier):
        g.op(1.0, 0.0)
    with pytest.raises(ValueError):
        velocity_group(0.0)


def test_log_group_examples():
    res = log_group()
    g = res.group
    assert g.op(2.0, 3.0) == 6.0
    assert g.identity == 1.0
    assert g.invert(4.0) == pytest.approx(0.25, rel=1e-15)
    assert g.metric(1.0, math.e) == pytest.approx(1.0, rel=1e-15)
    assert integrate(res.measure, IntervalSet.of((1, math.e)), 1e-12) == pytest.approx(1.0, abs=1e-12)


def test_arctan_examples():
    g = arctan_group(1.0).group
    assert g.op(0.0, 0.37) == pytest.approx(0.37, rel=1e-15)
    assert g.op(0.6, g.invert(0.6)) == pytest.approx(0.0, abs=1e-15)
    # (2/π)·atan(2·tan(π/8)), evaluated directly
    expected = 2 / math.pi * math.atan(2 * math.tan(math.pi / 8))
    assert g.op(0.25, 0.25) == pytest.approx(expected, rel=1e-15)
    assert expected == pytest.approx(0.4404363581972903, rel=1e-15)


def test_arctan_density_by_change_of_variables():
    c = 2.0
    m = arctan_group(c).measure
    ts = np.linspace(-1.9, 1.9, 17)
    k = math.pi / (2 * c)
    np.testing.assert_allclose(m.density(ts), k / np.cos(k * ts) ** 2, rtol=1e-13)


def test_metric_transport_is_an_isometry():
    res = velocity_group(2.0)
    f = res.witness
    rng = np.random.default_rng(3)
    for a, b in rng.normal(0, 3, (200, 2)):
        assert res.group.metric(f.f(a), f.f(b)) == pytest.approx(abs(a - b), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("c", [0.5, 1.0, 3e8])
def test_velocity_closed_form_matches_generic(c):
    res = velocity_group(c)
    rng = np.random.default_rng(11)
    xs, ys = res.generic.sample(rng, 1000), res.generic.sample(rng, 1000)
    worst = max(abs(res.generic.op(x, y) - velocity_add(x, y, c)) for x, y in zip(xs, ys))
    assert worst / c <= 1e-11


def test_arctan_closed_form_matches_generic():
    res = arctan_group(1.5)
    rng = np.random.default_rng(12)
    for x, y in zip(res.generic.sample(rng, 1000), res.generic.sample(rng, 1000)):
        assert res.generic.op(x, y) == pytest.approx(arctan_add(x, y, 1.5), abs=1e-11)


def test_transport_rejects_mismatched_domain():
    base, _ = base_circle()
    with pytest.raises(ConstructionError):
        transport_group(base, velocity_map(1.0))


def test_tags_are_copied_from_base():
    base, leb = base_real_line()
    res = transport(base, leb, exp_map())
    assert res.group.tags == base.tags
    assert res.group.identity == exp_map().f(base.identity)


def test_shear_golden_value():
    g = shear_group(5).group
    assert g.op((1, 1, 1, 1, 1), (2, 2, 2, 2, 2)) == (3, 7, 3, 3, 3)


def test_shear_golden_value_is_fast():
    g = shear_group(5).group
    x, y = (1, 1, 1, 1, 1), (2, 2, 2, 2, 2)
    start = time.perf_counter()
    for _ in range(1000):
        g.op(x, y)
    assert (time.perf_counter() - start) / 1000 < 1e-3


def test_shear_identity_and_cross_term():
    g = shear_group(3).group
    y = (0.3, -1.2, 4.0)
    assert g.op((0.0, 0.0, 0.0), y) == y
    x = (1.0, 0.0, 0.0)
    assert g.op(x, x)[1] - (x[1] + x[1]) == 2.0


@settings(max_examples=200)
@given(st.lists(st.floats(-50, 50), min_size=8, max_size=8))
def test_shear_second_component_formula(v):
    x, y = tuple(v[:4]), tuple(v[4:])
    z = shear_group(4).group.op(x, y)
    assert z[0] == x[0] + y[0]
    assert z[1] == pytest.approx(x[1] + y[1] + 2 * x[0] * y[0], rel=1e-12, abs=1e-9)
    assert z[2:] == (x[2] + y[2], x[3] + y[3])


def test_shear_dimension_rules():
    with pytest.raises(InvalidDimension):
        shear_group(2)
    with pytest.raises(DimensionMismatch):
        ShearMap(3).inverse((1.0, 2.0))


def test_shear_keeps_lebesgue():
    assert shear_group(3).measure.density(np.zeros(4)).tolist() == [1.0] * 4


def test_certificate_examples():
    line, _ = base_real_line()
    cert = one_dimensionality_certificate(line.metric, [0.5, 0.1, 0.3])
    assert cert.found and cert.residual <= 1e-12
    assert [[0.5, 0.1, 0.3][i] for i in cert.order] in ([0.1, 0.3, 0.5], [0.5, 0.3, 0.1])

    g = log_group().group
    pts = [math.e**3, 1.0, math.e]
    cert = one_dimensionality_certificate(g.metric, pts, key=math.log)
    assert cert.found and [pts[i] for i in cert.order] == [1.0, math.e, math.e**3]

    cert = one_dimensionality_certificate(math.dist, [(0, 0), (1, 0), (0, 1)])
    assert not cert.found and cert.residual > 0.5


def test_certificate_without_key_searches_exhaustively():
    g = velocity_group(1.0).group
    pts = [0.9, -0.5, 0.1, 0.7, -0.95]
    cert = one_dimensionality_certificate(g.metric, pts, key=lambda p: -abs(p))
    assert cert.found and cert.tried > 2
