"""Sampled falsification checks for the group and measure claims.

Each check returns a :class:`Report`. Algebraic residuals are measured in the
group's own metric; measure residuals are absolute masses. Evaluation errors
on individual samples are counted rather than raised.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

import numpy as np

from .expr import Dual, ExprError
from .groups import GroupSpec, MeasureSpec
from .intervals import IntervalSet
from .measure import Bijection1D, integrate, preimage_set, pushforward
from .quadrature import QuadratureError

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"
DECLARED = "declared-only"

ALGEBRAIC_TOL = 1e-9
MEASURE_TOL = 1e-6
QUAD_TOL = 1e-8
POSITIVE_MASS = 1e-12
MAX_WITNESSES = 10

# failures of a single sample evaluation, as opposed to harness bugs
SAMPLE_ERRORS = (ValueError, ArithmeticError, ExprError)


@dataclass
class Report:
    check: str
    group: str
    samples: int
    max_residual: float
    tol: float
    verdict: str
    witnesses: list = field(default_factory=list)
    errors: int = 0
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self) -> dict:
        d = asdict(self)
        d["max_residual"] = _json_float(self.max_residual)
        d["witnesses"] = [_jsonable(w) for w in self.witnesses]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, allow_nan=False)


def _json_float(v: float):
    return v if math.isfinite(v) else str(v)


def _jsonable(v: Any):
    if isinstance(v, IntervalSet):
        return v.to_list()
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        return _json_float(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


class _Tally:
    """Running maximum of residuals plus the worst witnesses seen."""

    def __init__(self, tol: float):
        self.tol = tol
        self.max = 0.0
        self.samples = 0
        self.errors = 0
        self.witnesses: list[tuple[float, Any]] = []

    def add(self, residual: float, witness: Any):
        self.samples += 1
        if not math.isfinite(residual):
            residual = math.inf
        self.max = max(self.max, residual)
        if residual > self.tol:
            self.witnesses.append((residual, witness))
            self.witnesses.sort(key=lambda p: -p[0])
            del self.witnesses[MAX_WITNESSES:]

    def error(self, witness: Any, exc: Exception):
        self.errors += 1
        if len(self.witnesses) < MAX_WITNESSES:
            self.witnesses.append((math.nan, {"input": witness, "error": f"{type(exc).__name__}: {exc}"}))

    def report(self, check: str, group: str, note: str = "") -> Report:
        if self.max > self.tol:
            verdict = FAIL
        elif self.errors or self.samples == 0:
            verdict = INCONCLUSIVE
        else:
            verdict = PASS
        witnesses = [w if math.isnan(r) else {"input": w, "residual": r} for r, w in self.witnesses]
        return Report(check, group, self.samples, self.max, self.tol, verdict, witnesses, self.errors, note)


def _triples(g: GroupSpec, n: int, seed: int, k: int = 3) -> list[tuple]:
    rng = np.random.default_rng(seed)
    cols = [g.sample(rng, n) for _ in range(k)]
    return list(zip(*cols))


# --------------------------------------------------------------------------
# Algebraic checks
# --------------------------------------------------------------------------


def check_group_axioms(g: GroupSpec, n: int = 1000, tol: float = ALGEBRAIC_TOL, seed: int = 0) -> Report:
    """Associativity, two-sided identity and inverses, closure on the carrier."""
    t = _Tally(tol)
    e, op, inv, rho = g.identity, g.op, g.invert, g.metric
    for x, y, z in _triples(g, n, seed):
        try:
            left = op(op(x, y), z)
            right = op(x, op(y, z))
            for v in (left, right):
                g.carrier.check(v)
            residual = max(
                rho(left, right),
                rho(op(x, e), x),
                rho(op(e, x), x),
                rho(op(x, inv(x)), e),
                rho(op(inv(x), x), e),
            )
        except SAMPLE_ERRORS as exc:
            t.error((x, y, z), exc)
            continue
        t.add(residual, (x, y, z))
    return t.report("axioms", g.name)


def check_abelian(g: GroupSpec, n: int = 1000, tol: float = ALGEBRAIC_TOL, seed: int = 0) -> Report:
    t = _Tally(tol)
    for x, y in _triples(g, n, seed, k=2):
        try:
            residual = g.metric(g.op(x, y), g.op(y, x))
        except SAMPLE_ERRORS as exc:
            t.error((x, y), exc)
            continue
        t.add(residual, (x, y))
    return t.report("abelian", g.name)


def check_metric_invariance(g: GroupSpec, n: int = 1000, tol: float = ALGEBRAIC_TOL, seed: int = 0) -> Report:
    """``ρ(h1⊙x⊙h2, h1⊙y⊙h2) = ρ(x, y)`` for a two-sided invariant metric."""
    t = _Tally(tol)
    if not g.metric_two_sided_invariant:
        return Report("metric-invariance", g.name, 0, math.nan, tol, DECLARED,
                      note="metric is not declared two-sided invariant")
    op, rho = g.op, g.metric
    for x, y, h1, h2 in _triples(g, n, seed, k=4):
        try:
            moved = rho(op(op(h1, x), h2), op(op(h1, y), h2))
            residual = abs(moved - rho(x, y))
        except SAMPLE_ERRORS as exc:
            t.error((x, y, h1, h2), exc)
            continue
        t.add(residual, (x, y, h1, h2))
    return t.report("metric-invariance", g.name)


def check_metric_axioms(g: GroupSpec, n: int = 1000, tol: float = ALGEBRAIC_TOL, seed: int = 0) -> Report:
    """Symmetry, zero on the diagonal and the triangle inequality."""
    t = _Tally(tol)
    rho = g.metric
    for x, y, z in _triples(g, n, seed):
        try:
            dxy, dyx = rho(x, y), rho(y, x)
            residual = max(abs(dxy - dyx), rho(x, x), -dxy, dxy - rho(x, z) - rho(z, y))
        except SAMPLE_ERRORS as exc:
            t.error((x, y, z), exc)
            continue
        t.add(residual, (x, y, z))
    return t.report("metric-axioms", g.name)


def _jacobian(fn: Callable[[Sequence], Sequence], x: Sequence[float]) -> np.ndarray:
    n = len(x)
    seeds = np.eye(n)
    out = fn(tuple(Dual(float(v), seeds[i]) for i, v in enumerate(x)))
    rows = []
    for v in out:
        eps = v.eps if isinstance(v, Dual) else 0.0
        rows.append(np.broadcast_to(np.asarray(eps, dtype=float), (n,)))
    return np.array(rows)


def check_jacobian_unimodular(g: GroupSpec, n: int = 100, tol: float = 1e-8, seed: int = 0) -> Report:
    """``|det J(x ↦ h⊙x)| = 1`` at sampled ``(h, x)``, by forward-mode derivatives."""
    t = _Tally(tol)
    for h, x in _triples(g, n, seed, k=2):
        try:
            jac = _jacobian(lambda v: g.op(h, v), x)
            residual = abs(abs(float(np.linalg.det(jac))) - 1.0)
        except SAMPLE_ERRORS as exc:
            t.error((h, x), exc)
            continue
        t.add(residual, (h, x))
    return t.report("jacobian-unimodular", g.name)


def declared_tags(g: GroupSpec) -> list[Report]:
    """Topological tags are propagated by construction and never sampled."""
    notes = {
        "compactness": f"{g.tags.compactness} (declared by construction)",
        "dense-in-itself": f"{g.tags.dense_in_itself} (no finite sample can refute isolation)",
    }
    return [Report(name, g.name, 0, math.nan, 0.0, DECLARED, note=note) for name, note in notes.items()]


# --------------------------------------------------------------------------
# Measure checks
# --------------------------------------------------------------------------


def _pair(g: GroupSpec, element, sidedness: str) -> tuple[Any, Any]:
    if sidedness == "two-sided":
        if isinstance(element, tuple) and len(element) == 2 and g.carrier.kind != "product":
            return element
        return element, element
    if sidedness == "left":
        return element, g.identity
    if sidedness == "right":
        return g.identity, element
    raise ValueError(f"unknown sidedness {sidedness!r}")


def check_measure_invariance(g: GroupSpec, m: MeasureSpec, sets: Sequence[IntervalSet], elements: Sequence,
                             sidedness: str = "two-sided", tol: float = MEASURE_TOL,
                             quad_tol: float = QUAD_TOL) -> Report:
    """``|m(h1⊙E⊙h2) − m(E)| <= tol`` for each ``(E, element)`` pair.

    For two-sided checks an element is either ``(h1, h2)`` or a single point
    used on both sides. Quadrature failures make the report inconclusive.
    """
    if g.translate_set is None:
        raise ValueError(f"{g.name} has no set translation")
    t = _Tally(tol)
    for s, element in zip(sets, elements):
        left, right = _pair(g, element, sidedness)
        try:
            moved = g.translate_set(s, left, right)
            residual = abs(integrate(m, moved, quad_tol) - integrate(m, s, quad_tol))
        except (QuadratureError, *SAMPLE_ERRORS) as exc:
            t.error({"set": s, "element": element}, exc)
            continue
        t.add(residual, {"set": s, "element": element, "image": moved})
    return t.report(f"measure-invariance[{sidedness}]", g.name)


def check_inverse_invariance(g: GroupSpec, m: MeasureSpec, sets: Sequence[IntervalSet], tol: float = MEASURE_TOL,
                             quad_tol: float = QUAD_TOL) -> Report:
    if g.invert_set is None:
        raise ValueError(f"{g.name} has no set inversion")
    t = _Tally(tol)
    for s in sets:
        try:
            flipped = g.invert_set(s)
            residual = abs(integrate(m, flipped, quad_tol) - integrate(m, s, quad_tol))
        except (QuadratureError, *SAMPLE_ERRORS) as exc:
            t.error({"set": s}, exc)
            continue
        t.add(residual, {"set": s, "image": flipped})
    return t.report("inverse-invariance", g.name)


def check_pushforward_consistency(m: MeasureSpec, f: Bijection1D, sets: Sequence[IntervalSet],
                                  tol: float = 1e-7, pushed: Optional[MeasureSpec] = None,
                                  quad_tol: float = 1e-10) -> Report:
    """Density route ``∫_Y q`` against preimage route ``m(f⁻¹(Y))``."""
    pushed = pushed if pushed is not None else pushforward(m, f)
    t = _Tally(tol)
    for s in sets:
        try:
            residual = abs(integrate(pushed, s, quad_tol) - integrate(m, preimage_set(f, s), quad_tol))
        except (QuadratureError, *SAMPLE_ERRORS) as exc:
            t.error({"set": s}, exc)
            continue
        t.add(residual, {"set": s})
    return t.report("pushforward-consistency", f"{pushed.name}@{f.label}")


def check_quasi_invariance(g: GroupSpec, m: MeasureSpec, sets: Sequence[IntervalSet], elements: Sequence,
                           threshold: float = POSITIVE_MASS, quad_tol: float = 1e-13) -> Report:
    """``m(E) > 0`` exactly when ``m(h1⊙E⊙h2) > 0``; the residual counts disagreements."""
    t = _Tally(0.0)
    for s, element in zip(sets, elements):
        left, right = _pair(g, element, "two-sided")
        try:
            moved = g.translate_set(s, left, right)
            before = integrate(m, s, quad_tol) > threshold
            after = integrate(m, moved, quad_tol) > threshold
        except (QuadratureError, *SAMPLE_ERRORS) as exc:
            t.error({"set": s, "element": element}, exc)
            continue
        t.add(float(before != after), {"set": s, "element": element, "before": before, "after": after})
    return t.report("quasi-invariance", g.name)


def check_total_mass(m: MeasureSpec, expected: float = 1.0, tol: float = 1e-8) -> Report:
    lo, hi = m.carrier.lo, m.carrier.hi
    t = _Tally(tol)
    try:
        t.add(abs(integrate(m, IntervalSet.of((lo, hi)), tol / 10) - expected), {"expected": expected})
    except (QuadratureError, *SAMPLE_ERRORS) as exc:
        t.error({"expected": expected}, exc)
    return t.report("total-mass", m.name)


# --------------------------------------------------------------------------
# Random inputs
# --------------------------------------------------------------------------


def random_interval_sets(rng: np.random.Generator, n: int, lo: float, hi: float,
                         max_pieces: int = 3) -> list[IntervalSet]:
    """Random finite unions inside ``[lo, hi)``; both bounds must be finite."""
    out = []
    for _ in range(n):
        k = int(rng.integers(1, max_pieces + 1))
        pts = np.sort(rng.uniform(lo, hi, 2 * k))
        out.append(IntervalSet(tuple((float(pts[2 * i]), float(pts[2 * i + 1])) for i in range(k))))
    return out


def random_sets_in_group(g: GroupSpec, rng: np.random.Generator, n: int, max_pieces: int = 3) -> list[IntervalSet]:
    """Random sets whose endpoints are sampled group points, so they follow the carrier's scale."""
    out = []
    for _ in range(n):
        k = int(rng.integers(1, max_pieces + 1))
        pts = sorted(float(v) for v in g.sample(rng, 2 * k))
        out.append(IntervalSet(tuple((pts[2 * i], pts[2 * i + 1]) for i in range(k))))
    return out


def run_suite(checks: Iterable[Callable[[], Report | list[Report]]]) -> list[Report]:
    """Run checks in declaration order, flattening lists of reports."""
    reports: list[Report] = []
    for check in checks:
        r = check()
        reports.extend(r if isinstance(r, list) else [r])
    return reports
