"""Turning a diffused measure on the line into the Haar measure of a constructed group.

Probability case: the cdf ``F`` maps the support onto [0, 1) (after a
countable correction when ``F`` misses 0), and the circle group is pulled
back through it, so the input measure becomes the invariant one.

σ-finite case: both the input measure and Lebesgue measure on the line are
normalized part by part (part ``k`` gets weight ``2⁻ᵏ``), matched part by part
with a cdf map, and the line group is pulled back. ``μ*`` then restores the
original scale on each part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .groups import (
    COMPACT,
    LOCALLY_COMPACT,
    PROBABILITY,
    SIGMA_FINITE,
    GroupSpec,
    MeasureSpec,
    Tags,
    base_real_line,
    circle_distance,
    circle_invert_set,
    circle_shift,
)
from .intervals import IntervalSet
from .measure import Distribution, integrate, quantile
from .quadrature import integrate_function

TAIL = 1e-12
TRUNCATION_K = math.ceil(math.log2(1.0 / TAIL))  # sum_{k>K} 2^-k < TAIL


class CdfNotStrictlyIncreasing(ValueError):
    pass


class ZeroOrInfinitePartMass(ValueError):
    pass


class PartitionMismatch(ValueError):
    pass


class SetOutsideSupport(ValueError):
    pass


# --------------------------------------------------------------------------
# Probability measures
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class HotelShift:
    """Escape sequence ``a_n = start + n·step`` used to make the cdf hit 0."""

    start: float = 0.0
    step: float = 1.0

    def point(self, n: int) -> float:
        return self.start + n * self.step


@dataclass(frozen=True)
class HaarizedGroup:
    dist: Distribution
    shift: Optional[HotelShift]
    group: GroupSpec = field(repr=False, compare=False)
    measure: MeasureSpec = field(repr=False, compare=False)

    def escape_index(self, x: float) -> Optional[int]:
        """``n`` when ``x`` is the escape point ``a_n``, else None.

        Points whose cdf already rounds to 1 are outside the float image and
        are not treated as escape points.
        """
        if self.shift is None:
            return None
        n = round((x - self.shift.start) / self.shift.step)
        if n < 0 or self.shift.point(n) != x or self.dist.cdf(x) >= 1.0:
            return None
        return n

    def phi(self, x: float) -> float:
        """The corrected cdf: a bijection from the support onto [0, 1)."""
        n = self.escape_index(x)
        if n is not None:
            return 0.0 if n == 0 else self.dist.cdf(self.shift.point(n - 1))
        return self.dist.cdf(x)

    def phi_inv(self, u: float) -> float:
        if u == 0.0:
            return self.shift.point(0) if self.shift is not None else self.dist.support[0]
        x = quantile(self.dist, u)
        if self.shift is not None:
            # u = F(a_n) exactly means u belongs to the escape point a_(n+1)
            guess = round((x - self.shift.start) / self.shift.step)
            for n in range(max(0, guess - 2), guess + 3):
                if self.dist.cdf(self.shift.point(n)) == u:
                    return self.shift.point(n + 1)
        return x

    def cdf_image(self, s: IntervalSet) -> IntervalSet:
        """``F(s)`` as a subset of [0, 1); escape points are μ-null and ignored."""
        lo, hi = self.dist.support
        if not s.within(lo, hi):
            raise SetOutsideSupport(f"{s} is not inside the support {self.dist.support}")
        return s.map_monotone(self.dist.cdf)

    def quantile_image(self, s: IntervalSet) -> IntervalSet:
        lo, hi = self.dist.support

        def q(v):
            if v <= 0.0:
                return lo
            if v >= 1.0:
                return hi
            return quantile(self.dist, v)

        return s.map_monotone(q)

    def translate_set(self, s: IntervalSet, left: float, right: float) -> IntervalSet:
        t = self.phi(left) + self.phi(right)
        return self.quantile_image(circle_shift(self.cdf_image(s), t))

    def invert_set(self, s: IntervalSet) -> IntervalSet:
        return self.quantile_image(circle_invert_set(self.cdf_image(s)))


def _check_strictly_increasing(d: Distribution, samples: int = 257):
    us = np.linspace(0.0, 1.0, samples)[1:-1]
    xs = [quantile(d, float(u)) for u in us]
    fs = [d.cdf(x) for x in xs]
    if any(b <= a for a, b in zip(xs, xs[1:])) or any(b <= a for a, b in zip(fs, fs[1:])):
        raise CdfNotStrictlyIncreasing(f"cdf of {d.name} is not strictly increasing")
    if np.any(np.asarray(d.density(np.asarray(xs))) <= 0):
        raise CdfNotStrictlyIncreasing(f"density of {d.name} vanishes inside the support")


def _check_shift(d: Distribution, shift: HotelShift):
    lo, hi = d.support
    if not shift.step > 0:
        raise ValueError("escape step must be positive")
    if not (lo < shift.point(0) < hi and lo < shift.point(1) < hi):
        raise ValueError(f"escape points must lie inside the support of {d.name}")
    if math.isfinite(hi):
        raise ValueError("an escape sequence a_n = start + n*step needs a support unbounded above")


def haarize_probability(d: Distribution, shift: HotelShift | None = None) -> HaarizedGroup:
    """Compact abelian group on the support of ``d`` with ``d`` as its Haar measure."""
    _check_strictly_increasing(d)
    if d.closed_left:
        shift = None
        identity = d.support[0]
    else:
        shift = shift or HotelShift(start=d.center, step=1.0)
        _check_shift(d, shift)
        identity = shift.point(0)

    holder: dict = {}

    def phi(x):
        return holder["h"].phi(x)

    def phi_inv(u):
        return holder["h"].phi_inv(u)

    carrier = d.carrier
    chk = carrier.check

    def op(x, y):
        return phi_inv((phi(chk(x)) + phi(chk(y))) % 1.0)

    def invert(x):
        return phi_inv((1.0 - phi(chk(x))) % 1.0)

    def metric(x, y):
        return circle_distance(phi(chk(x)), phi(chk(y)))

    def sampler(rng, size):
        return [phi_inv(float(u)) for u in rng.uniform(0.0, 1.0, size)]

    group = GroupSpec(
        name=f"haarized[{d.name}]",
        carrier=carrier,
        op=op,
        identity=identity,
        invert=invert,
        metric=metric,
        tags=Tags(abelian=True, compactness=COMPACT),
        translate_set=lambda s, left, right: holder["h"].translate_set(s, left, right),
        invert_set=lambda s: holder["h"].invert_set(s),
        sampler=sampler,
    )
    h = HaarizedGroup(d, shift, group, d.measure())
    holder["h"] = h
    return h


def translate_set(h: HaarizedGroup, g: float, s: IntervalSet, side: str = "left") -> IntervalSet:
    """``g ⊙ s`` (left) or ``s ⊙ g`` (right); the group is abelian so both agree."""
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    return h.translate_set(s, g, h.group.identity)


# --------------------------------------------------------------------------
# σ-finite measures
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LinePartition:
    """Unit-width cells ``[origin + j·width, origin + (j+1)·width)`` numbered
    centre-outward: j = 0, 1, -1, 2, -2, ... get k = 1, 2, 3, 4, 5, ..."""

    width: float = 1.0
    origin: float = 0.0

    @staticmethod
    def k_of(j: int) -> int:
        return 2 * j if j > 0 else 1 - 2 * j

    @staticmethod
    def j_of(k: int) -> int:
        if k < 1:
            raise ValueError("parts are numbered from 1")
        return k // 2 if k % 2 == 0 else -(k - 1) // 2

    def part(self, k: int) -> tuple[float, float]:
        j = self.j_of(k)
        return self.origin + j * self.width, self.origin + (j + 1) * self.width

    def position(self, x: float) -> int:
        return math.floor((x - self.origin) / self.width)

    def index_of(self, x: float) -> int:
        return self.k_of(self.position(x))

    def index_array(self, xs: np.ndarray) -> np.ndarray:
        j = np.floor((np.asarray(xs, dtype=float) - self.origin) / self.width)
        j = np.clip(j, -(2.0**52), 2.0**52)
        return np.where(j > 0, 2 * j, 1 - 2 * j).astype(np.int64)

    def boundaries(self, a: float, b: float, kmax: int = 2 * TRUNCATION_K) -> list[float]:
        """Cell boundaries strictly inside (a, b) belonging to cells numbered <= kmax."""
        jmax = kmax // 2 + 1
        lo = max(a, self.origin - jmax * self.width)
        hi = min(b, self.origin + jmax * self.width)
        if not lo < hi:
            return []
        j0, j1 = math.floor((lo - self.origin) / self.width), math.ceil((hi - self.origin) / self.width)
        return [p for p in (self.origin + j * self.width for j in range(j0, j1 + 1)) if a < p < b]

    def split(self, s: IntervalSet, max_parts: int | None = None) -> list[tuple[int, float, float]]:
        """Pieces ``(k, a, b)`` of ``s``, each inside a single cell."""
        out = []
        for a, b in s:
            if not (math.isfinite(a) and math.isfinite(b)):
                raise ValueError("only bounded sets meet finitely many parts")
            pts = [a, *self.boundaries(a, b, kmax=10**9), b]
            for lo, hi in zip(pts[:-1], pts[1:]):
                out.append((self.index_of(lo), lo, hi))
        if max_parts is not None and len({k for k, _, _ in out}) > max_parts:
            raise ValueError(f"set meets more than {max_parts} parts")
        return out


def _constant(m: MeasureSpec) -> Optional[float]:
    return getattr(m.density, "value", None)


def partial_mass(m: MeasureSpec, a: float, x: float, tol: float = 1e-13) -> float:
    if x <= a:
        return 0.0
    value = _constant(m)
    if value is not None:
        return (x - a) * value
    return integrate_function(m.density, a, x, tol)


def partial_mass_inverse(m: MeasureSpec, a: float, b: float, target: float, total: float) -> float:
    """``x`` in [a, b] with ``m([a, x)) = target``, given ``total = m([a, b))``."""
    if target <= 0.0:
        return a
    if target >= total:
        return b
    value = _constant(m)
    if value is not None:
        return a + target / value
    lo, hi = a, b
    x = a + (b - a) * target / total
    for _ in range(200):
        r = partial_mass(m, a, x) - target
        if abs(r) <= 1e-14 * max(1.0, total):
            return x
        if r > 0:
            hi = x
        else:
            lo = x
        p = float(m.density(np.array([x]))[0])
        nx = x - r / p if p > 0 else math.nan
        if not lo < nx < hi:
            nx = 0.5 * (lo + hi)
        if nx == x or np.nextafter(lo, hi) >= hi:
            return x
        x = nx
    return x


class PartMasses:
    """Lazily computed, cached masses ``m(Y_k)``; results are deterministic."""

    def __init__(self, m: MeasureSpec, parts: LinePartition):
        self.m = m
        self.parts = parts
        self._mass = lru_cache(maxsize=None)(self._compute)

    def _compute(self, k: int) -> float:
        lo, hi = self.parts.part(k)
        mass = partial_mass(self.m, lo, hi)
        if not (math.isfinite(mass) and mass > 0.0):
            raise ZeroOrInfinitePartMass(f"part {k} = [{lo}, {hi}) has mass {mass!r}")
        return mass

    def __call__(self, k: int) -> float:
        return self._mass(int(k))


def normalize_sigma_finite(m: MeasureSpec, parts: LinePartition) -> MeasureSpec:
    """Probability ``μ₁(Y) = Σ_k m(Y ∩ Y_k) / (2^k m(Y_k))``."""
    masses = PartMasses(m, parts)

    def density(x):
        x = np.asarray(x, dtype=float)
        ks = parts.index_array(x)
        out = np.zeros(x.shape)
        for k in np.unique(ks):
            sel = ks == k
            if k > 1000:
                continue  # weight 2^-k underflows
            out[sel] = m.density(x[sel]) / (2.0 ** int(k) * masses(int(k)))
        return out

    density.masses = masses
    return MeasureSpec(f"normalized[{m.name}]", m.carrier, density, PROBABILITY,
                       extra_cuts=parts.boundaries)


@dataclass(frozen=True)
class PartwiseIsomorphism:
    """Cdf matching of part ``Y_k`` onto base part ``X_k``.

    Both normalized measures give part ``k`` weight ``2⁻ᵏ``, so matching each
    part by its relative mass sends ``μ₁`` to ``μ₂`` exactly.
    """

    measure: MeasureSpec
    parts: LinePartition
    base_measure: MeasureSpec
    base_parts: LinePartition
    masses: PartMasses = field(compare=False)
    base_masses: PartMasses = field(compare=False)

    @classmethod
    def build(cls, measure, parts, base_measure, base_parts) -> "PartwiseIsomorphism":
        return cls(measure, parts, base_measure, base_parts,
                   PartMasses(measure, parts), PartMasses(base_measure, base_parts))

    def _local(self, src_m, src_parts, src_masses, dst_m, dst_parts, dst_masses, k, x):
        p, _ = src_parts.part(k)
        P, Q = dst_parts.part(k)
        frac = partial_mass(src_m, p, x) / src_masses(k)
        return partial_mass_inverse(dst_m, P, Q, frac * dst_masses(k), dst_masses(k))

    def forward(self, x: float) -> float:
        k = self.parts.index_of(x)
        return self._local(self.measure, self.parts, self.masses,
                           self.base_measure, self.base_parts, self.base_masses, k, x)

    def inverse(self, w: float) -> float:
        k = self.base_parts.index_of(w)
        return self._local(self.base_measure, self.base_parts, self.base_masses,
                           self.measure, self.parts, self.masses, k, w)

    def image(self, s: IntervalSet) -> IntervalSet:
        out = []
        for k, a, b in self.parts.split(s):
            fa = self._local(self.measure, self.parts, self.masses,
                             self.base_measure, self.base_parts, self.base_masses, k, a)
            fb = self._local(self.measure, self.parts, self.masses,
                             self.base_measure, self.base_parts, self.base_masses, k, b)
            out.append((fa, fb))
        return IntervalSet(tuple(out))

    def preimage(self, s: IntervalSet) -> IntervalSet:
        out = []
        for k, a, b in self.base_parts.split(s):
            ga = self._local(self.base_measure, self.base_parts, self.base_masses,
                             self.measure, self.parts, self.masses, k, a)
            gb = self._local(self.base_measure, self.base_parts, self.base_masses,
                             self.measure, self.parts, self.masses, k, b)
            out.append((ga, gb))
        return IntervalSet(tuple(out))


def mu_star(mu1: MeasureSpec, phi: PartwiseIsomorphism, base_parts: LinePartition) -> MeasureSpec:
    """``μ*(X) = Σ_k 2^k λ₂(X_k) μ₁(X ∩ φ⁻¹(X_k))`` as a density measure.

    ``φ⁻¹(X_k) = Y_k`` by construction, so on ``Y_k`` the density is
    ``2^k λ₂(X_k) · p₁``.
    """
    if phi.base_parts != base_parts:
        raise PartitionMismatch("phi was built against different base parts")
    parts, base_masses = phi.parts, phi.base_masses

    def density(x):
        x = np.asarray(x, dtype=float)
        ks = parts.index_array(x)
        out = np.zeros(x.shape)
        p1 = mu1.density(x)
        for k in np.unique(ks):
            sel = ks == k
            if k > 1000:
                continue
            out[sel] = 2.0 ** int(k) * base_masses(int(k)) * p1[sel]
        return out

    return MeasureSpec(f"mu_star[{phi.measure.name}]", mu1.carrier, density, SIGMA_FINITE,
                       extra_cuts=parts.boundaries)


def mu_star_series(mu1: MeasureSpec, phi: PartwiseIsomorphism, X: IntervalSet, tol: float = 1e-12) -> float:
    """Evaluate the defining series term by term on a bounded set."""
    total = 0.0
    for k in sorted({k for k, _, _ in phi.parts.split(X)}):
        lo, hi = phi.parts.part(k)
        piece = X.intersect(IntervalSet.of((lo, hi)))
        total += 2.0**k * phi.base_masses(k) * integrate(mu1, piece, tol)
    return total


@dataclass(frozen=True)
class SigmaFiniteHaarized:
    group: GroupSpec
    measure: MeasureSpec  # μ*
    mu: MeasureSpec
    mu1: MeasureSpec
    mu2: MeasureSpec
    phi: PartwiseIsomorphism
    truncation_k: int = TRUNCATION_K
    equivalent: bool = True

    def series(self, X: IntervalSet) -> float:
        return mu_star_series(self.mu1, self.phi, X)


def haarize_sigma_finite(m: MeasureSpec, parts: LinePartition | None = None,
                         base_parts: LinePartition | None = None, seed: int = 0) -> SigmaFiniteHaarized:
    """Non-compact group on the line with ``μ*`` invariant and equivalent to ``m``."""
    parts = parts or LinePartition()
    base_parts = base_parts or LinePartition()
    base, lam = base_real_line()
    mu1 = normalize_sigma_finite(m, parts)
    mu2 = normalize_sigma_finite(lam, base_parts)
    phi = PartwiseIsomorphism.build(m, parts, lam, base_parts)
    star = mu_star(mu1, phi, base_parts)

    def op(x, y):
        return phi.inverse(phi.forward(x) + phi.forward(y))

    def invert(x):
        return phi.inverse(-phi.forward(x))

    def metric(x, y):
        return abs(phi.forward(x) - phi.forward(y))

    def translate(s, left, right):
        return phi.preimage(phi.image(s).shift(phi.forward(left) + phi.forward(right)))

    def invert_set(s):
        return phi.preimage(phi.image(s).map_monotone(lambda v: -v, increasing=False))

    def sampler(rng, size):
        return [phi.inverse(float(v)) for v in rng.uniform(-2.0, 2.0, size)]

    group = GroupSpec(
        name=f"sigma-haarized[{m.name}]",
        carrier=m.carrier,
        op=op,
        identity=phi.inverse(0.0),
        invert=invert,
        metric=metric,
        tags=Tags(abelian=True, compactness=LOCALLY_COMPACT),
        translate_set=translate,
        invert_set=invert_set,
        sampler=sampler,
    )
    equivalent = _equivalence(m, star, parts, seed)
    return SigmaFiniteHaarized(group, star, m, mu1, mu2, phi, TRUNCATION_K, equivalent)


def _equivalence(m: MeasureSpec, star: MeasureSpec, parts: LinePartition, seed: int, samples: int = 256) -> bool:
    """``m`` and ``μ*`` have the same null sets when their densities vanish together.

    Densities are compared pointwise on samples from [-8, 8]; comparing masses
    instead would confuse positive but sub-threshold tails with null sets.
    """
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-8.0, 8.0, samples)
    keep = np.array([m.carrier.contains(float(x)) for x in xs])
    xs = xs[keep]
    return bool(np.array_equal(np.asarray(m.density(xs)) > 0, np.asarray(star.density(xs)) > 0))
