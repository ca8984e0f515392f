"""Integration over interval sets, monotone bijections, pushforwards, distributions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping, Optional

import numpy as np

from . import expr as ex
from .groups import PROBABILITY, Carrier, MeasureSpec
from .intervals import IntervalSet
from .quadrature import QuadratureError, integrate_function

DEFAULT_TOL = 1e-10


class SetOutsideCarrier(ValueError):
    pass


class ConstructionError(ValueError):
    pass


class QuantileError(ArithmeticError):
    pass


# --------------------------------------------------------------------------
# Integration
# --------------------------------------------------------------------------


def integrate(m: MeasureSpec, s: IntervalSet, tol: float = DEFAULT_TOL) -> float:
    """Mass of ``s`` under ``m``; the absolute tolerance is shared across pieces."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    c = m.carrier
    if c.kind != "product" and not s.within(c.lo, c.hi):
        raise SetOutsideCarrier(f"{s} is not inside {c}")
    pieces = []
    for a, b in s:
        pts = [a, *m.split_points(a, b), b]
        pieces.extend(zip(pts[:-1], pts[1:]))
    if not pieces:
        return 0.0
    share = tol / len(pieces)
    total = 0.0
    for a, b in pieces:
        try:
            total += integrate_function(m.density, a, b, share)
        except QuadratureError as err:
            raise QuadratureError(str(err), total + err.estimate, err.evaluations) from None
    return total


# --------------------------------------------------------------------------
# Bijections
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Bijection1D:
    """Monotone bijection ``domain -> codomain`` given by paired expressions.

    Open intervals; ``domain``/``codomain`` endpoints may be infinite.
    """

    forward: ex.Expr
    inverse: ex.Expr
    params: Mapping[str, float] = field(default_factory=dict)
    domain: tuple[float, float] = (-math.inf, math.inf)
    codomain: tuple[float, float] = (-math.inf, math.inf)
    monotone: str = "increasing"
    name: str = ""

    @classmethod
    def from_strings(cls, forward: str, inverse: str, params=None, **kw) -> "Bijection1D":
        params = dict(params or {})
        names = set(params) | set(ex.DEFAULT_PARAMS)
        return cls(ex.parse(forward, names), ex.parse(inverse, names), params, **kw)

    @property
    def increasing(self) -> bool:
        return self.monotone == "increasing"

    @cached_property
    def f(self) -> Callable[[float], float]:
        return ex.compile_scalar(self.forward, self.params)

    @cached_property
    def finv(self) -> Callable[[float], float]:
        return ex.compile_scalar(self.inverse, self.params)

    @cached_property
    def f_array(self):
        return ex.compile_array(self.forward, self.params)

    @cached_property
    def finv_array(self):
        return ex.compile_array(self.inverse, self.params)

    def forward_point(self, x: float) -> float:
        """Forward map extended to the domain endpoints (limits)."""
        lo, hi = self.domain
        if x == lo or x == hi:
            low, high = self.codomain if self.increasing else self.codomain[::-1]
            return low if x == lo else high
        return self.f(x)

    def inverse_point(self, y: float) -> float:
        lo, hi = self.codomain
        if y == lo or y == hi:
            low, high = self.domain if self.increasing else self.domain[::-1]
            return low if y == lo else high
        return self.finv(y)

    def inverse_slope(self, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """``f⁻¹(y)`` and ``d f⁻¹/dy`` at every ``y`` by dual numbers."""
        return ex.derivative_array(self.inverse, ys, self.params)

    def check(self, n: int = 1000, seed: int = 0) -> float:
        """Largest ``|f⁻¹(f(x)) - x| / max(1, |x|)`` on sampled domain points.

        Raises :class:`ConstructionError` if monotonicity or the codomain fails.
        """
        rng = np.random.default_rng(seed)
        xs = np.sort(sample_open_interval(self.domain, rng, n))
        ys = self.f_array(xs)
        if not np.all(np.isfinite(ys)):
            raise ConstructionError(f"{self.label} is not finite on its domain")
        lo, hi = self.codomain
        if np.any(ys < lo) or np.any(ys > hi):
            raise ConstructionError(f"{self.label} leaves its codomain")
        steps = np.diff(ys)
        if (self.increasing and np.any(steps < 0)) or (not self.increasing and np.any(steps > 0)):
            raise ConstructionError(f"{self.label} is not {self.monotone}")
        back = self.finv_array(ys)
        return float(np.max(np.abs(back - xs) / np.maximum(1.0, np.abs(xs))))

    @property
    def label(self) -> str:
        return self.name or f"x -> {self.forward}"


def sample_open_interval(bounds: tuple[float, float], rng: np.random.Generator, n: int) -> np.ndarray:
    lo, hi = bounds
    if math.isfinite(lo) and math.isfinite(hi):
        xs = rng.uniform(lo, hi, n)
        return xs[(xs > lo) & (xs < hi)]
    z = rng.standard_normal(n)
    if math.isfinite(lo):
        return lo + np.exp(z)
    if math.isfinite(hi):
        return hi - np.exp(z)
    return z


def preimage_set(f: Bijection1D, s: IntervalSet) -> IntervalSet:
    lo, hi = f.codomain
    if not s.within(lo, hi):
        raise SetOutsideCarrier(f"{s} is not inside the codomain ({lo}, {hi})")
    return s.map_monotone(f.inverse_point, f.increasing)


def image_set(f: Bijection1D, s: IntervalSet) -> IntervalSet:
    lo, hi = f.domain
    if not s.within(lo, hi):
        raise SetOutsideCarrier(f"{s} is not inside the domain ({lo}, {hi})")
    return s.map_monotone(f.forward_point, f.increasing)


@dataclass(frozen=True)
class PushforwardDensity:
    """``q(y) = p(f⁻¹(y)) · |d f⁻¹/dy|``."""

    base: Callable[[np.ndarray], np.ndarray]
    f: Bijection1D

    def __call__(self, ys):
        ys = np.asarray(ys, dtype=float)
        with np.errstate(all="ignore"):
            pre, slope = self.f.inverse_slope(ys)
            p = self.base(pre)
            # a vanishing base density wins over an overflowing slope
            return np.where(p == 0, 0.0, p * np.abs(slope))


def pushforward(m: MeasureSpec, f: Bijection1D, samples: int = 64) -> MeasureSpec:
    lo, hi = f.domain
    if m.carrier.lo > lo or m.carrier.hi < hi:
        raise ConstructionError(f"measure on {m.carrier} does not cover the domain of {f.label}")
    density = PushforwardDensity(m.density, f)
    probe = sample_open_interval(f.codomain, np.random.default_rng(12345), samples)
    if not np.all(np.isfinite(density(probe))):
        raise ConstructionError(f"derivative of the inverse of {f.label} is undefined inside the codomain")
    cuts = []
    for p in m.cuts:
        if lo < p < hi:
            cuts.append(f.f(p))
    carrier = Carrier.interval(*f.codomain)
    return MeasureSpec(f"({m.name})_{f.name or 'f'}", carrier, density, m.mass_class, tuple(sorted(cuts)))


# --------------------------------------------------------------------------
# Bijection catalogue
# --------------------------------------------------------------------------


def identity_map() -> Bijection1D:
    return Bijection1D.from_strings("x", "x", name="identity")


def exp_map() -> Bijection1D:
    return Bijection1D.from_strings("exp(x)", "ln(x)", codomain=(0.0, math.inf), name="exp")


def velocity_map(c: float) -> Bijection1D:
    return Bijection1D.from_strings(
        "c*(exp(x)-1)/(1+exp(x))", "ln((c+x)/(c-x))", {"c": c}, codomain=(-c, c), name=f"velocity[c={c!r}]"
    )


def arctan_map(c: float) -> Bijection1D:
    return Bijection1D.from_strings(
        "2*c*atan(x)/pi", "tan(pi*x/(2*c))", {"c": c}, codomain=(-c, c), name=f"arctan[c={c!r}]"
    )


def negation_map() -> Bijection1D:
    return Bijection1D.from_strings("-x", "-x", monotone="decreasing", name="negation")


def affine_map(scale: float, offset: float) -> Bijection1D:
    return Bijection1D.from_strings(
        "a*x+b", "(x-b)/a", {"a": scale, "b": offset},
        monotone="increasing" if scale > 0 else "decreasing", name=f"affine[{scale!r},{offset!r}]",
    )


def log_map() -> Bijection1D:
    return Bijection1D.from_strings("ln(x)", "exp(x)", domain=(0.0, math.inf), name="log")


def catalogued_bijections() -> list[Bijection1D]:
    return [
        identity_map(), exp_map(), velocity_map(1.0), velocity_map(0.5), velocity_map(3.0),
        arctan_map(1.0), arctan_map(2.0), negation_map(), affine_map(2.0, 1.0), affine_map(-0.5, 3.0), log_map(),
    ]


# --------------------------------------------------------------------------
# Distributions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Distribution:
    """A diffused probability on ``support`` with a strictly increasing cdf there.

    ``cdf``/``quantile`` are closed forms when known; otherwise the cdf is a
    numeric integral of the density and the quantile is found numerically.
    ``closed_left`` marks a support whose lower end carries cdf 0.
    """

    name: str
    density: Callable[[np.ndarray], np.ndarray]
    support: tuple[float, float]
    cdf_fn: Optional[Callable[[float], float]] = None
    quantile_fn: Optional[Callable[[float], float]] = None
    closed_left: bool = False
    center: float = 0.0
    scale: float = 1.0
    sf_fn: Optional[Callable[[float], float]] = None

    def sf(self, x: float) -> float:
        """``1 - cdf(x)``, from a closed form when one keeps upper-tail digits."""
        lo, hi = self.support
        if x <= lo:
            return 1.0
        if x >= hi:
            return 0.0
        if self.sf_fn is not None:
            return self.sf_fn(x)
        return 1.0 - self.cdf(x)

    def cdf(self, x: float) -> float:
        lo, hi = self.support
        if x <= lo:
            return 0.0
        if x >= hi:
            return 1.0
        if self.cdf_fn is not None:
            return self.cdf_fn(x)
        return min(1.0, max(0.0, integrate(self.measure(), IntervalSet.of((lo, x)), 1e-14)))

    def pdf(self, x: float) -> float:
        return float(self.density(np.array([x]))[0])

    @property
    def carrier(self) -> Carrier:
        return Carrier.interval(*self.support, closed_left=self.closed_left)

    def measure(self) -> MeasureSpec:
        cuts = (self.center,) if self.support[0] < self.center < self.support[1] else ()
        return MeasureSpec(self.name, self.carrier, self.density, PROBABILITY, cuts)


def quantile(d: Distribution, u: float, tol: float = 1e-12) -> float:
    """``x`` with ``|cdf(x) - u| <= tol``: closed form, else bracketed Newton."""
    if not 0.0 < u < 1.0:
        raise QuantileError(f"u must lie in (0, 1), got {u!r}")
    if d.quantile_fn is not None:
        return d.quantile_fn(u)
    return _invert_cdf(d, u, tol)


def _invert_cdf(d: Distribution, u: float, tol: float) -> float:
    lo, hi = d.support
    step = d.scale
    a = max(lo, d.center - step)
    while a > lo and d.cdf(a) > u:
        step *= 2.0
        a = max(lo, d.center - step) if math.isfinite(d.center - step) else lo
        if step > 1e300:
            raise QuantileError(f"no lower bracket for u={u!r}")
    step = d.scale
    b = min(hi, d.center + step)
    while b < hi and d.cdf(b) < u:
        step *= 2.0
        b = min(hi, d.center + step)
        if step > 1e300:
            raise QuantileError(f"no upper bracket for u={u!r}")
    x = 0.5 * (a + b) if math.isfinite(a) and math.isfinite(b) else d.center
    # tail-relative target: tiny u still gets an accurate x; the upper half
    # is solved on the survival function where 1 - u is exact
    target = tol * min(u, 1.0 - u)
    upper = u > 0.5
    v = 1.0 - u
    for _ in range(400):
        r = v - d.sf(x) if upper else d.cdf(x) - u
        if abs(r) <= target:
            return x
        if r > 0:
            b = x
        else:
            a = x
        p = d.pdf(x)
        nx = x - r / p if p > 0 else math.nan
        if not (a < nx < b):
            nx = 0.5 * (a + b)
        if nx == x or a == b or np.nextafter(a, b) == b:
            # bracket collapsed to adjacent floats: cdf resolution reached
            return x
        x = nx
    raise QuantileError(f"quantile did not converge for u={u!r}")


def uniform(a: float = 0.0, b: float = 1.0) -> Distribution:
    width = b - a

    def density(x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= a) & (x < b), 1.0 / width, 0.0)

    if a == 0.0 and b == 1.0:
        cdf, q = (lambda x: x), (lambda u: u)
    else:
        cdf, q = (lambda x: (x - a) / width), (lambda u: a + width * u)
    return Distribution("uniform" if (a, b) == (0.0, 1.0) else f"uniform:{a!r},{b!r}", density, (a, b), cdf, q,
                        closed_left=True, center=0.5 * (a + b), scale=width)


def exponential(rate: float = 1.0) -> Distribution:
    if rate <= 0:
        raise ValueError("rate must be positive")

    def density(x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, rate * np.exp(-rate * np.maximum(x, 0.0)), 0.0)

    return Distribution(
        f"exponential:{rate!r}", density, (0.0, math.inf),
        cdf_fn=lambda x: -math.expm1(-rate * x),
        quantile_fn=lambda u: -math.log1p(-u) / rate,
        closed_left=True, center=0.0, scale=1.0 / rate,
    )


def normal(mean: float = 0.0, sd: float = 1.0) -> Distribution:
    """Closed-form cdf via erfc; the quantile is found numerically."""
    if sd <= 0:
        raise ValueError("sd must be positive")
    k = 1.0 / (sd * math.sqrt(2.0 * math.pi))

    def density(x):
        z = (np.asarray(x, dtype=float) - mean) / sd
        return k * np.exp(-0.5 * z * z)

    def cdf(x):
        return 0.5 * math.erfc(-(x - mean) / (sd * math.sqrt(2.0)))

    def sf(x):
        return 0.5 * math.erfc((x - mean) / (sd * math.sqrt(2.0)))

    return Distribution(f"normal:{mean!r},{sd!r}", density, (-math.inf, math.inf), cdf, None,
                        center=mean, scale=sd, sf_fn=sf)


def cauchy(loc: float = 0.0, scale: float = 1.0) -> Distribution:
    if scale <= 0:
        raise ValueError("scale must be positive")

    def density(x):
        z = (np.asarray(x, dtype=float) - loc) / scale
        return 1.0 / (math.pi * scale * (1.0 + z * z))

    def cdf(x):
        # atan2 form keeps relative accuracy in the lower tail
        return math.atan2(1.0, -(x - loc) / scale) / math.pi

    def q(u):
        return loc + scale * math.tan(math.pi * (u - 0.5))

    return Distribution(f"cauchy:{loc!r},{scale!r}", density, (-math.inf, math.inf), cdf, q,
                        center=loc, scale=scale)


def beta(a: float, b: float) -> Distribution:
    """Beta(a, b) on [0, 1); cdf from scipy's regularized incomplete beta, quantile numeric."""
    from scipy.special import betainc, betaincc, betaln

    if a <= 0 or b <= 0:
        raise ValueError("beta parameters must be positive")
    log_norm = float(betaln(a, b))

    def density(x):
        x = np.asarray(x, dtype=float)
        inside = (x > 0) & (x < 1)
        xc = np.where(inside, x, 0.5)
        with np.errstate(all="ignore"):
            val = np.exp((a - 1) * np.log(xc) + (b - 1) * np.log1p(-xc) - log_norm)
        return np.where(inside, val, 0.0)

    mode = (a - 1) / (a + b - 2) if a > 1 and b > 1 else 0.5
    return Distribution(f"beta:{a!r},{b!r}", density, (0.0, 1.0), lambda x: float(betainc(a, b, x)), None,
                        closed_left=True, center=mode, scale=0.25, sf_fn=lambda x: float(betaincc(a, b, x)))


def distribution_from_name(text: str) -> Distribution:
    """``uniform``, ``exponential:<rate>``, ``normal:<mean>,<sd>``, ``cauchy:<loc>,<scale>``, ``beta:<a>,<b>``."""
    name, _, rest = text.partition(":")
    try:
        args = [float(v) for v in rest.split(",")] if rest else []
    except ValueError:
        raise ValueError(f"bad distribution arguments in {text!r}") from None
    builders = {"uniform": (uniform, (0, 2)), "exponential": (exponential, (1,)), "normal": (normal, (2,)),
                "cauchy": (cauchy, (2,)), "beta": (beta, (2,))}
    if name not in builders:
        raise ValueError(f"unknown distribution {name!r}")
    build, arities = builders[name]
    if len(args) not in arities:
        raise ValueError(f"{name} takes {' or '.join(map(str, arities))} arguments, got {len(args)}")
    return build(*args)
