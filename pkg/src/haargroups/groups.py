"""Base Polish groups with known Haar measures, and the shared group/measure records."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .intervals import IntervalSet

COMPACT = "compact"
LOCALLY_COMPACT = "locally-compact-noncompact"
NON_LOCALLY_COMPACT = "non-locally-compact"

PROBABILITY = "probability"
SIGMA_FINITE = "sigma-finite-nonfinite"
QUASI_FINITE = "quasi-finite"


class PointOutsideCarrier(ValueError):
    pass


class InvalidDimension(ValueError):
    pass


@dataclass(frozen=True)
class Carrier:
    """Underlying set of a group.

    ``kind`` is one of ``line``, ``interval``, ``half-line``, ``circle`` or
    ``product``. Intervals are open unless ``closed_left`` is set; the circle
    is ``[0, 1)`` with wraparound.
    """

    kind: str
    lo: float = -math.inf
    hi: float = math.inf
    dim: int = 1
    closed_left: bool = False

    def __post_init__(self):
        if self.kind not in ("line", "interval", "half-line", "circle", "product"):
            raise ValueError(f"unknown carrier kind {self.kind!r}")
        if not self.lo < self.hi:
            raise ValueError(f"empty carrier ({self.lo}, {self.hi})")
        if self.dim < 1:
            raise InvalidDimension("dimension must be >= 1")

    @classmethod
    def line(cls) -> "Carrier":
        return cls("line")

    @classmethod
    def interval(cls, lo: float, hi: float, closed_left: bool = False) -> "Carrier":
        if not (math.isfinite(lo) and math.isfinite(hi)):
            if lo == 0.0 and hi == math.inf:
                return cls.half_line(closed_left)
            if lo == -math.inf and hi == math.inf:
                return cls.line()
        return cls("interval", lo, hi, closed_left=closed_left)

    @classmethod
    def half_line(cls, closed_left: bool = False) -> "Carrier":
        return cls("half-line", 0.0, math.inf, closed_left=closed_left)

    @classmethod
    def circle(cls) -> "Carrier":
        return cls("circle", 0.0, 1.0, closed_left=True)

    @classmethod
    def product(cls, n: int) -> "Carrier":
        if n < 1:
            raise InvalidDimension(f"dimension must be >= 1, got {n}")
        return cls("product", dim=n)

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def contains(self, x) -> bool:
        if self.kind == "product":
            return len(x) == self.dim and all(math.isfinite(v) for v in x)
        if not math.isfinite(x):
            return False
        if self.closed_left:
            return self.lo <= x < self.hi
        return self.lo < x < self.hi

    def check(self, x):
        if not self.contains(x):
            raise PointOutsideCarrier(f"{x!r} is not in {self}")
        return x

    def sample(self, rng: np.random.Generator, size: int):
        if self.kind == "product":
            return [tuple(row) for row in rng.standard_normal((size, self.dim))]
        if self.bounded:
            lo, hi = self.lo, self.hi
            xs = rng.uniform(lo, hi, size)
            return [float(v) for v in xs if self.contains(v)] or [0.5 * (lo + hi)]
        z = rng.standard_normal(size)
        if self.kind == "line":
            return [float(v) for v in z]
        if self.lo == -math.inf:
            return [float(self.hi - math.exp(v)) for v in z]
        return [float(self.lo + math.exp(v)) for v in z]

    def __str__(self) -> str:
        if self.kind == "product":
            return f"R^{self.dim}"
        if self.kind == "circle":
            return "[0,1) mod 1"
        left = "[" if self.closed_left else "("
        return f"{left}{self.lo},{self.hi})"


@dataclass(frozen=True)
class Tags:
    abelian: bool
    compactness: str
    dense_in_itself: bool = True


@dataclass(frozen=True)
class GroupSpec:
    """A group on ``carrier`` with an invariant metric.

    ``translate_set(s, left, right)`` returns ``left ⊙ s ⊙ right`` for interval
    sets when the construction family supports it. ``sampler`` draws carrier
    points for the verification harness.
    """

    name: str
    carrier: Carrier
    op: Callable[[Any, Any], Any]
    identity: Any
    invert: Callable[[Any], Any]
    metric: Callable[[Any, Any], float]
    tags: Tags
    translate_set: Optional[Callable[[IntervalSet, Any, Any], IntervalSet]] = None
    invert_set: Optional[Callable[[IntervalSet], IntervalSet]] = None
    sampler: Optional[Callable[[np.random.Generator, int], list]] = None
    metric_two_sided_invariant: bool = True

    def sample(self, rng: np.random.Generator, size: int) -> list:
        if self.sampler is not None:
            return list(self.sampler(rng, size))
        return self.carrier.sample(rng, size)


@dataclass(frozen=True)
class MeasureSpec:
    """Measure with a density against length on ``carrier``.

    ``density`` is vectorized over numpy arrays. ``cuts`` are points where the
    density peaks or is not smooth; ``split_points`` may add more per range.
    """

    name: str
    carrier: Carrier
    density: Callable[[np.ndarray], np.ndarray]
    mass_class: str = SIGMA_FINITE
    cuts: tuple = ()
    extra_cuts: Optional[Callable[[float, float], Sequence[float]]] = field(default=None, compare=False)

    def split_points(self, a: float, b: float) -> list[float]:
        pts = {p for p in self.cuts if a < p < b}
        if self.extra_cuts is not None:
            pts.update(p for p in self.extra_cuts(a, b) if a < p < b)
        return sorted(pts)


def constant_density(value: float) -> Callable[[np.ndarray], np.ndarray]:
    def density(x):
        return np.full(np.shape(x), value, dtype=float)

    density.value = value
    return density


def lebesgue(carrier: Carrier, scale: float = 1.0, mass_class: str | None = None) -> MeasureSpec:
    if mass_class is None:
        mass_class = PROBABILITY if (carrier.bounded and scale * (carrier.hi - carrier.lo) == 1.0) else SIGMA_FINITE
    name = "lebesgue" if scale == 1.0 else f"{scale!r}*lebesgue"
    return MeasureSpec(name, carrier, constant_density(scale), mass_class)


# --------------------------------------------------------------------------
# Base groups
# --------------------------------------------------------------------------


def _line_translate(s: IntervalSet, left: float, right: float) -> IntervalSet:
    return s.shift(left + right)


def _line_invert_set(s: IntervalSet) -> IntervalSet:
    return s.map_monotone(lambda v: -v, increasing=False)


def base_real_line():
    """(R, +, |x - y|) with Lebesgue measure."""
    carrier = Carrier.line()
    group = GroupSpec(
        name="real-line",
        carrier=carrier,
        op=lambda x, y: x + y,
        identity=0.0,
        invert=lambda x: -x,
        metric=lambda x, y: abs(x - y),
        tags=Tags(abelian=True, compactness=LOCALLY_COMPACT),
        translate_set=_line_translate,
        invert_set=_line_invert_set,
    )
    return group, lebesgue(carrier)


def circle_shift(s: IntervalSet, t: float) -> IntervalSet:
    """Rotate a subset of ``[0, 1)`` by ``t``; a piece crossing 1 splits in two."""
    t = t % 1.0
    out = []
    for a, b in s:
        a2, b2 = a + t, b + t
        if a2 >= 1.0:
            out.append((a2 - 1.0, b2 - 1.0))
        elif b2 > 1.0:
            out.append((a2, 1.0))
            out.append((0.0, b2 - 1.0))
        else:
            out.append((a2, b2))
    return IntervalSet(tuple(out))


def circle_invert_set(s: IntervalSet) -> IntervalSet:
    out = []
    for a, b in s:
        # u -> (1 - u) mod 1 sends [a, b) to (1-b, 1-a]; 0 itself maps to 0
        out.append((1.0 - b, 1.0 - a))
    return IntervalSet(tuple(out))


def circle_distance(x: float, y: float) -> float:
    d = abs(x - y) % 1.0
    return min(d, 1.0 - d)


def base_circle():
    """[0, 1) under addition mod 1 with arc-length metric and Lebesgue measure."""
    carrier = Carrier.circle()
    group = GroupSpec(
        name="circle",
        carrier=carrier,
        op=lambda x, y: (x + y) % 1.0,
        identity=0.0,
        invert=lambda x: (1.0 - x) % 1.0,
        metric=circle_distance,
        tags=Tags(abelian=True, compactness=COMPACT),
        translate_set=lambda s, left, right: circle_shift(s, left + right),
        invert_set=circle_invert_set,
    )
    return group, lebesgue(carrier, mass_class=PROBABILITY)


def base_real_n(n: int):
    """(R^n, +, Euclidean distance) with volume measure; points are tuples."""
    if n < 1:
        raise InvalidDimension(f"dimension must be >= 1, got {n}")
    carrier = Carrier.product(n)
    group = GroupSpec(
        name=f"real-n:{n}",
        carrier=carrier,
        op=lambda x, y: tuple(a + b for a, b in zip(x, y)),
        identity=(0.0,) * n,
        invert=lambda x: tuple(-a for a in x),
        metric=lambda x, y: math.dist(x, y),
        tags=Tags(abelian=True, compactness=LOCALLY_COMPACT),
    )
    return group, lebesgue(carrier)


def base_group(name: str):
    """Resolve ``real-line``, ``circle`` or ``real-n:<n>``."""
    if name == "real-line":
        return base_real_line()
    if name == "circle":
        return base_circle()
    if name.startswith("real-n:"):
        try:
            n = int(name.split(":", 1)[1])
        except ValueError:
            raise InvalidDimension(f"bad dimension in {name!r}") from None
        return base_real_n(n)
    raise KeyError(f"unknown base group {name!r}")
