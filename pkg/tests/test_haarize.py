import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haargroups.groups import COMPACT, LOCALLY_COMPACT, Carrier, MeasureSpec, base_circle, lebesgue
from haargroups.haarize import (
    TRUNCATION_K,
    CdfNotStrictlyIncreasing,
    HotelShift,
    LinePartition,
    PartitionMismatch,
    PartwiseIsomorphism,
    SetOutsideSupport,
    ZeroOrInfinitePartMass,
    haarize_probability,
    haarize_sigma_finite,
    mu_star,
    mu_star_series,
    normalize_sigma_finite,
    translate_set,
)
from haargroups.intervals import IntervalSet
from haargroups.measure import Distribution, cauchy, exponential, integrate, normal, uniform

LN2 = math.log(2)
LINE = Carrier.line()


# -- probability measures ---------------------------------------------------


def test_uniform_reduces_to_circle():
    h = haarize_probability(uniform())
    assert h.shift is None
    assert h.group.op(0.25, 0.5) == 0.75
    circle, _ = base_circle()
    for x, y in [(0.75, 0.5), (0.125, 0.875), (0.0, 0.5)]:
        assert h.group.op(x, y) == circle.op(x, y)
    assert h.group.tags.compactness == COMPACT and h.group.tags.abelian


def test_exponential_wraps_to_identity():
    h = haarize_probability(exponential(1.0))
    assert h.shift is None and h.group.identity == 0.0
    assert h.group.op(LN2, LN2) == 0.0


def test_normal_escape_sequence():
    h = haarize_probability(normal())
    assert h.shift == HotelShift(0.0, 1.0)
    assert h.group.identity == 0.0
    assert h.phi(0.0) == 0.0
    for n in range(1, 6):
        assert h.phi(float(n)) == normal().cdf(float(n - 1))
        assert h.phi_inv(h.phi(float(n))) == float(n)
    x = 0.3
    assert h.group.op(0.0, x) == pytest.approx(x, abs=1e-12)


def test_phi_is_a_bijection_on_samples():
    for d in (normal(), cauchy(), exponential(2.0)):
        h = haarize_probability(d)
        rng = np.random.default_rng(0)
        for u in rng.uniform(0, 1, 300):
            assert h.phi(h.phi_inv(float(u))) == pytest.approx(u, abs=1e-10)


def test_escape_points_are_exact_far_out():
    h = haarize_probability(cauchy())
    for n in (10, 1000, 10**6):
        assert h.phi_inv(h.phi(float(n))) == float(n)
    assert h.group.op(float(10**6), h.group.identity) == float(10**6)


def test_translate_set_examples():
    u = haarize_probability(uniform())
    assert translate_set(u, 0.5, IntervalSet.of((0.25, 0.5))) == IntervalSet.of((0.75, 1.0))
    assert translate_set(u, 0.75, IntervalSet.of((0.5, 0.75))) == IntervalSet.of((0.25, 0.5))
    assert translate_set(u, 0.5, IntervalSet.of((0.25, 0.5)), side="right") == IntervalSet.of((0.75, 1.0))
    e = haarize_probability(exponential(1.0))
    moved = translate_set(e, LN2, IntervalSet.of((0.0, LN2)))
    assert moved.lo == pytest.approx(LN2, rel=1e-15) and moved.hi == math.inf


def test_translate_wraps_into_two_pieces():
    h = haarize_probability(normal())
    s = IntervalSet.of((0.5, 2.0))
    # cdf image [0.69, 0.98) moved by cdf(-1.28) = 0.10 straddles 1
    moved = h.translate_set(s, -1.28, 0.0)
    assert len(moved) == 2
    m = h.measure
    assert integrate(m, moved, 1e-10) == pytest.approx(integrate(m, s, 1e-10), abs=1e-9)


def test_translate_rejects_sets_outside_support():
    h = haarize_probability(exponential(1.0))
    with pytest.raises(SetOutsideSupport):
        h.translate_set(IntervalSet.of((-1.0, 1.0)), 0.5, 0.0)
    with pytest.raises(ValueError):
        translate_set(h, 0.5, IntervalSet.of((0.0, 1.0)), side="up")


def test_flat_cdf_is_rejected():
    def density(x):
        x = np.asarray(x, dtype=float)
        return np.where((np.abs(x) > 1) & (np.abs(x) < 2), 0.5, 0.0)

    gap = Distribution("gap", density, (-2.0, 2.0), closed_left=True)
    with pytest.raises(CdfNotStrictlyIncreasing):
        haarize_probability(gap)


def test_bad_escape_sequences():
    with pytest.raises(ValueError):
        haarize_probability(normal(), HotelShift(0.0, -1.0))
    with pytest.raises(ValueError):
        haarize_probability(normal(), HotelShift(0.0, 0.0))


@pytest.mark.parametrize("d", [normal(), cauchy(0.5, 2.0), exponential(3.0)], ids=lambda d: d.name)
def test_measure_invariance_small(d):
    h = haarize_probability(d)
    rng = np.random.default_rng(1)
    m = h.measure
    for _ in range(15):
        a, b = sorted(h.group.sample(rng, 2))
        g1, g2 = h.group.sample(rng, 2)
        s = IntervalSet.of((a, b))
        assert integrate(m, h.translate_set(s, g1, g2), 1e-10) == pytest.approx(integrate(m, s, 1e-10), abs=1e-8)
        assert integrate(m, h.invert_set(s), 1e-10) == pytest.approx(integrate(m, s, 1e-10), abs=1e-8)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**30 - 1), st.integers(0, 2**30 - 1))
def test_uniform_op_is_bit_exact_circle_addition(p, q):
    x, y = p / 2**30, q / 2**30
    h = haarize_probability(uniform())
    assert h.group.op(x, y) == (x + y) % 1.0 == ((p + q) % 2**30) / 2**30


# -- σ-finite measures --------------------------------------------------------


def test_partition_numbering():
    parts = LinePartition()
    assert [parts.part(k) for k in (1, 2, 3, 4, 5)] == [(0, 1), (1, 2), (-1, 0), (2, 3), (-2, -1)]
    with pytest.raises(ValueError):
        parts.part(0)


@settings(max_examples=300)
@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_partition_index_round_trip(x):
    parts = LinePartition()
    k = parts.index_of(x)
    lo, hi = parts.part(k)
    assert lo <= x < hi
    assert LinePartition.k_of(LinePartition.j_of(k)) == k
    assert parts.index_array(np.array([x]))[0] == k


def test_normalized_lebesgue():
    mu1 = normalize_sigma_finite(lebesgue(LINE), LinePartition())
    assert integrate(mu1, IntervalSet.of((-math.inf, math.inf)), 1e-13) == pytest.approx(1.0, abs=1e-8)
    assert integrate(mu1, IntervalSet.of((0, 1)), 1e-14) == 0.5
    assert integrate(mu1, IntervalSet.of((0, 0.5)), 1e-14) == 0.25


def test_zero_part_mass_is_rejected():
    half = MeasureSpec("half", LINE, lambda x: np.where(np.asarray(x) >= 0, 1.0, 0.0))
    mu1 = normalize_sigma_finite(half, LinePartition())
    with pytest.raises(ZeroOrInfinitePartMass):
        mu1.density(np.array([-0.5]))


def _identity_scenario():
    leb = lebesgue(LINE)
    parts = LinePartition()
    mu1 = normalize_sigma_finite(leb, parts)
    phi = PartwiseIsomorphism.build(leb, parts, leb, parts)
    return mu1, phi, parts


def test_identity_scenario_phi_is_identity():
    _, phi, _ = _identity_scenario()
    for x in (-3.7, -1.0, 0.0, 0.25, 2.5, 11.0):
        assert phi.forward(x) == x and phi.inverse(x) == x


def test_mu_star_examples():
    mu1, phi, parts = _identity_scenario()
    star = mu_star(mu1, phi, parts)
    assert integrate(star, IntervalSet.of((0, 3)), 1e-12) == pytest.approx(3.0, abs=1e-12)
    assert mu_star_series(mu1, phi, IntervalSet.of((0, 3))) == pytest.approx(3.0, abs=1e-12)
    assert integrate(star, IntervalSet()) == 0.0
    for k in range(1, 9):
        lo, hi = parts.part(k)
        cell = phi.preimage(IntervalSet.of((lo, hi)))
        assert mu_star_series(mu1, phi, cell) == pytest.approx(1.0, rel=1e-14)


def test_mu_star_total_over_first_parts():
    mu1, phi, parts = _identity_scenario()
    star = mu_star(mu1, phi, parts)
    for K in (1, 4, 9):
        cells = IntervalSet(tuple(parts.part(k) for k in range(1, K + 1)))
        assert integrate(star, cells, 1e-12) == pytest.approx(float(K), rel=1e-13)


def test_mu_star_checks_partition():
    mu1, phi, _ = _identity_scenario()
    with pytest.raises(PartitionMismatch):
        mu_star(mu1, phi, LinePartition(width=2.0))


def test_sigma_finite_lebesgue_recovers_the_line():
    res = haarize_sigma_finite(lebesgue(LINE))
    g = res.group
    assert g.identity == 0.0
    assert g.op(0.3, 2.5) == 2.8
    assert g.tags.compactness == LOCALLY_COMPACT
    assert res.equivalent and res.truncation_k == TRUNCATION_K
    rng = np.random.default_rng(4)
    base = IntervalSet.of((0, 1))
    for t in rng.uniform(-10, 10, 20):
        moved = g.translate_set(base, float(t), 0.0)
        assert integrate(res.measure, moved, 1e-12) == pytest.approx(1.0, abs=1e-10)


def test_sigma_finite_probability_input():
    # a probability measure also goes through the σ-finite pipeline
    res = haarize_sigma_finite(normal().measure())
    g, star = res.group, res.measure
    rng = np.random.default_rng(9)
    for _ in range(10):
        a = float(rng.uniform(-2, 2))
        s = IntervalSet.of((a, a + float(rng.uniform(0.05, 1.0))))
        h1, h2 = (float(v) for v in rng.uniform(-2, 2, 2))
        moved = g.translate_set(s, h1, h2)
        assert integrate(star, moved, 1e-10) == pytest.approx(integrate(star, s, 1e-10), abs=1e-8)
    assert res.equivalent
    assert g.op(0.7, g.invert(0.7)) == pytest.approx(g.identity, abs=1e-12)


def test_series_matches_density_route_for_weighted_measure():
    m = MeasureSpec("w", LINE, lambda x: 1.0 + np.asarray(x, float) ** 2)
    res = haarize_sigma_finite(m)
    s = IntervalSet.of((-1.6, 0.4), (1.1, 2.9))
    assert res.series(s) == pytest.approx(integrate(res.measure, s, 1e-12), abs=1e-10)
