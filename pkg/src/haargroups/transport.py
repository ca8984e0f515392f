"""Group structures carried over by a bijection, and the worked examples built on them.

Given a group ``(G, ⊙, ρ)`` with Haar measure ``λ`` and a bijection ``f``,
the image carries ``x ⊙_f y = f(f⁻¹(x) ⊙ f⁻¹(y))``, ``ρ_f(x, y) = ρ(f⁻¹x, f⁻¹y)``
and the invariant measure ``λ_f(Y) = λ(f⁻¹(Y))``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .groups import (
    LOCALLY_COMPACT,
    Carrier,
    GroupSpec,
    InvalidDimension,
    MeasureSpec,
    Tags,
    base_real_line,
    constant_density,
    lebesgue,
)
from .measure import (
    Bijection1D,
    ConstructionError,
    arctan_map,
    exp_map,
    identity_map,
    image_set,
    preimage_set,
    pushforward,
    velocity_map,
)


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class TransportResult:
    group: GroupSpec
    measure: MeasureSpec
    witness: Any
    provenance: str
    base: Optional[GroupSpec] = None
    base_measure: Optional[MeasureSpec] = None
    generic: Optional[GroupSpec] = None


def transport_group(base: GroupSpec, f: Bijection1D, name: str | None = None) -> GroupSpec:
    """The group ``f`` induces on its codomain from a one-dimensional ``base``."""
    if base.carrier.kind == "product":
        raise ConstructionError("transport_group handles one-dimensional bases; use shear_group for R^n")
    if (base.carrier.lo, base.carrier.hi) != tuple(f.domain):
        raise ConstructionError(f"{f.label} has domain {f.domain}, base carrier is {base.carrier}")
    carrier = Carrier.interval(*f.codomain)
    fwd, inv, chk = f.f, f.finv, carrier.check

    def op(x, y):
        return fwd(base.op(inv(chk(x)), inv(chk(y))))

    def invert(x):
        return fwd(base.invert(inv(chk(x))))

    def metric(x, y):
        return base.metric(inv(chk(x)), inv(chk(y)))

    translate = None
    if base.translate_set is not None:
        def translate(s, left, right):
            moved = base.translate_set(preimage_set(f, s), inv(chk(left)), inv(chk(right)))
            return image_set(f, moved)

    invert_set = None
    if base.invert_set is not None:
        def invert_set(s):
            return image_set(f, base.invert_set(preimage_set(f, s)))

    def sampler(rng, size):
        return [fwd(v) for v in base.sample(rng, size)]

    identity = fwd(base.identity)
    chk(identity)
    return GroupSpec(
        name=name or f"{base.name}@{f.label}",
        carrier=carrier,
        op=op,
        identity=identity,
        invert=invert,
        metric=metric,
        tags=base.tags,
        translate_set=translate,
        invert_set=invert_set,
        sampler=sampler,
        metric_two_sided_invariant=base.metric_two_sided_invariant,
    )


def transport_measure(base_measure: MeasureSpec, f: Bijection1D) -> MeasureSpec:
    return pushforward(base_measure, f)


def transport(base: GroupSpec, base_measure: MeasureSpec, f: Bijection1D, name: str | None = None) -> TransportResult:
    group = transport_group(base, f, name)
    return TransportResult(
        group=group,
        measure=transport_measure(base_measure, f),
        witness=f,
        provenance=f"{base.name} via {f.label}",
        base=base,
        base_measure=base_measure,
        generic=group,
    )


def _with_closed_form(result: TransportResult, op: Callable, scale: float, name: str,
                      samples: int = 32, tol: float = 1e-12) -> TransportResult:
    """Swap in a closed-form operation after checking it against the generic one."""
    generic = result.generic
    rng = np.random.default_rng(2024)
    xs, ys = generic.sample(rng, samples), generic.sample(rng, samples)
    for x, y in zip(xs, ys):
        gap = abs(op(x, y) - generic.op(x, y))
        if gap > tol * max(scale, abs(op(x, y))):
            raise ConstructionError(f"closed form for {name} disagrees with transport at ({x!r}, {y!r}): {gap!r}")
    carrier = generic.carrier

    def checked(x, y):
        return op(carrier.check(x), carrier.check(y))

    return replace(result, group=replace(generic, name=name, op=checked))


# --------------------------------------------------------------------------
# Worked examples
# --------------------------------------------------------------------------


def velocity_add(x: float, y: float, c: float) -> float:
    return (x + y) / (1.0 + x * y / (c * c))


def velocity_group(c: float) -> TransportResult:
    """Relativistic velocity addition on (-c, c).

    The base Lebesgue measure is scaled by c/2 so the transported density is
    exactly c²/(c² - t²); any positive multiple of a Haar measure is Haar.
    """
    if not c > 0:
        raise ValueError("c must be positive")
    base, _ = base_real_line()
    base_measure = lebesgue(base.carrier, scale=c / 2)
    result = transport(base, base_measure, velocity_map(c))
    return _with_closed_form(result, lambda x, y: velocity_add(x, y, c), c, f"velocity:{c!r}")


def velocity_density(c: float) -> Callable[[np.ndarray], np.ndarray]:
    def density(t):
        t = np.asarray(t, dtype=float)
        return c * c / (c * c - t * t)

    return density


def log_group() -> TransportResult:
    """Multiplicative group (0, ∞) with metric |ln x - ln y| and density 1/x."""
    base, leb = base_real_line()
    result = transport(base, leb, exp_map())
    result = _with_closed_form(result, lambda x, y: x * y, 1.0, "log")
    return replace(result, measure=replace(result.measure, cuts=(1.0,)))


def arctan_add(x: float, y: float, c: float) -> float:
    k = math.pi / (2.0 * c)
    return math.atan(math.tan(k * x) + math.tan(k * y)) / k


def arctan_group(c: float) -> TransportResult:
    if not c > 0:
        raise ValueError("c must be positive")
    base, leb = base_real_line()
    result = transport(base, leb, arctan_map(c))
    return _with_closed_form(result, lambda x, y: arctan_add(x, y, c), c, f"arctan:{c!r}")


def identity_group() -> TransportResult:
    base, leb = base_real_line()
    return transport(base, leb, identity_map(), name="identity")


# --------------------------------------------------------------------------
# Shear on R^n
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ShearMap:
    """``(x1, x2, x3, ...) -> (x1, x1² + x2, x3, ...)``; works on floats or duals."""

    n: int

    def _check(self, x: Sequence) -> Sequence:
        if len(x) != self.n:
            raise DimensionMismatch(f"expected {self.n} coordinates, got {len(x)}")
        return x

    def forward(self, x: Sequence) -> tuple:
        x = self._check(x)
        return (x[0], x[0] * x[0] + x[1], *x[2:])

    def inverse(self, x: Sequence) -> tuple:
        x = self._check(x)
        return (x[0], x[1] - x[0] * x[0], *x[2:])


def shear_group(n: int) -> TransportResult:
    if n < 3:
        raise InvalidDimension(f"shear needs n >= 3, got {n}")
    f = ShearMap(n)
    carrier = Carrier.product(n)

    def op(x, y):
        a, b = f.inverse(x), f.inverse(y)
        return f.forward(tuple(p + q for p, q in zip(a, b)))

    def invert(x):
        return f.forward(tuple(-p for p in f.inverse(x)))

    def metric(x, y):
        return math.dist(f.inverse(x), f.inverse(y))

    def sampler(rng, size):
        return [f.forward(tuple(row)) for row in rng.standard_normal((size, n))]

    group = GroupSpec(
        name=f"shear:{n}",
        carrier=carrier,
        op=op,
        identity=(0.0,) * n,
        invert=invert,
        metric=metric,
        tags=Tags(abelian=True, compactness=LOCALLY_COMPACT),
        sampler=sampler,
    )
    # the shear has unit Jacobian, so volume is carried to itself
    measure = MeasureSpec("lebesgue", carrier, constant_density(1.0))
    return TransportResult(group, measure, f, f"real-n:{n} via shear")


# --------------------------------------------------------------------------
# One-dimensionality
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Outcome of searching for an ordering with ρ(first, last) = Σ consecutive ρ."""

    found: bool
    order: tuple[int, ...]
    residual: float
    tried: int


def _chain_residual(metric, pts, order) -> float:
    chain = sum(metric(pts[order[k]], pts[order[k + 1]]) for k in range(len(order) - 1))
    return abs(metric(pts[order[0]], pts[order[-1]]) - chain)


def one_dimensionality_certificate(metric: Callable[[Any, Any], float], points: Sequence,
                                   key: Callable[[Any], Any] | None = None, tol: float = 1e-9,
                                   exhaustive_limit: int = 7) -> Certificate:
    """Find a permutation realizing the chain equality, or refute it.

    The order induced by ``key`` (for transported metrics, ``f⁻¹``) and its
    reverse are tried first; small sets are then searched exhaustively.
    """
    pts = list(points)
    if len(pts) < 2:
        return Certificate(True, tuple(range(len(pts))), 0.0, 0)
    key = key or (lambda p: p)
    by_key = tuple(sorted(range(len(pts)), key=lambda i: key(pts[i])))
    best = (math.inf, by_key)
    tried = 0
    for order in (by_key, by_key[::-1]):
        tried += 1
        r = _chain_residual(metric, pts, order)
        if r <= tol:
            return Certificate(True, order, r, tried)
        best = min(best, (r, order))
    if len(pts) <= exhaustive_limit:
        for order in itertools.permutations(range(len(pts))):
            if order[0] > order[-1]:
                continue  # a reversed chain has the same sums
            tried += 1
            r = _chain_residual(metric, pts, order)
            if r <= tol:
                return Certificate(True, order, r, tried)
            best = min(best, (r, order))
    return Certificate(False, best[1], best[0], tried)
