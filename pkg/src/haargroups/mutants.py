"""Deliberately broken constructions, one per check, to test the harness itself.

Every mutant is paired with the check that must reject it. A harness whose
check passes a mutant has lost its power to detect that fault.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .groups import LOCALLY_COMPACT, Carrier, GroupSpec, MeasureSpec, Tags, base_real_line
from .measure import velocity_map
from .transport import shear_group
from . import verify


@dataclass(frozen=True)
class Mutant:
    name: str
    check: str
    description: str
    run: Callable[[], verify.Report]


def _line():
    return base_real_line()


def off_by_epsilon_identity(eps: float = 1e-6) -> GroupSpec:
    g, _ = _line()
    return replace(g, name="mutant:identity+eps", identity=eps)


def broken_inverse() -> GroupSpec:
    g, _ = _line()
    return replace(g, name="mutant:invert=id", invert=lambda x: x)


def matrix_group() -> GroupSpec:
    """2×2 real matrices (flattened) under multiplication: a non-abelian op."""

    def as_matrix(x):
        return np.asarray(x, dtype=float).reshape(2, 2)

    def op(x, y):
        return tuple((as_matrix(x) @ as_matrix(y)).ravel())

    def invert(x):
        return tuple(np.linalg.inv(as_matrix(x)).ravel())

    return GroupSpec(
        name="mutant:matrix-product",
        carrier=Carrier.product(4),
        op=op,
        identity=(1.0, 0.0, 0.0, 1.0),
        invert=invert,
        metric=lambda x, y: math.dist(x, y),
        tags=Tags(abelian=True, compactness=LOCALLY_COMPACT),
    )


def non_invariant_metric() -> GroupSpec:
    """|x³ − y³| is a metric on the line but not translation invariant."""
    g, _ = _line()
    return replace(g, name="mutant:cubic-metric", metric=lambda x, y: abs(x**3 - y**3))


def gaussian_weight() -> MeasureSpec:
    """A finite, non-invariant measure declared as the line's Haar measure."""
    carrier = Carrier.line()
    return MeasureSpec("mutant:gaussian-weight", carrier, lambda x: np.exp(-0.5 * np.asarray(x, float) ** 2))


def unscaled_velocity_density(c: float = 1.0) -> MeasureSpec:
    """``c²/(c² − t²)`` claimed as the image of plain Lebesgue; the true image density is ``2/c`` times it."""
    def density(t):
        t = np.asarray(t, dtype=float)
        return c * c / (c * c - t * t)

    return MeasureSpec("mutant:unscaled-velocity", Carrier.interval(-c, c), density)


def half_line_measure() -> MeasureSpec:
    """Lebesgue restricted to [0, ∞): translations move null sets onto positive ones."""
    def density(x):
        return np.where(np.asarray(x, float) >= 0, 1.0, 0.0)

    return MeasureSpec("mutant:half-line", Carrier.line(), density, cuts=(0.0,))


def scaling_op(n: int = 3) -> GroupSpec:
    """``(h, x) ↦ h + 2x`` on R^n: translations are no longer volume preserving."""
    g = shear_group(n).group
    return replace(g, name=f"mutant:scaling:{n}", op=lambda h, x: tuple(a + 2 * b for a, b in zip(h, x)))


def _sets(rng, n, lo, hi):
    return verify.random_interval_sets(rng, n, lo, hi)


def _run_measure_invariance():
    g, _ = _line()
    rng = np.random.default_rng(0)
    sets = _sets(rng, 20, -2.0, 2.0)
    elements = [(float(a), float(b)) for a, b in rng.uniform(-3, 3, (20, 2))]
    return verify.check_measure_invariance(g, gaussian_weight(), sets, elements)


def _run_pushforward():
    _, leb = _line()
    rng = np.random.default_rng(0)
    sets = _sets(rng, 20, -0.9, 0.9)
    return verify.check_pushforward_consistency(leb, velocity_map(1.0), sets, pushed=unscaled_velocity_density(1.0))


def _run_quasi_invariance():
    g, _ = _line()
    rng = np.random.default_rng(0)
    sets = _sets(rng, 20, -5.0, -1.0)
    elements = [(float(v), 0.0) for v in rng.uniform(6.0, 9.0, 20)]
    return verify.check_quasi_invariance(g, half_line_measure(), sets, elements)


MUTANTS: tuple[Mutant, ...] = (
    Mutant("off-by-epsilon-identity", "axioms", "identity moved by 1e-6",
           lambda: verify.check_group_axioms(off_by_epsilon_identity(), n=200)),
    Mutant("broken-inverse", "axioms", "inversion returns its argument",
           lambda: verify.check_group_axioms(broken_inverse(), n=200)),
    Mutant("matrix-product", "abelian", "2×2 matrix multiplication tagged abelian",
           lambda: verify.check_abelian(matrix_group(), n=200)),
    Mutant("cubic-metric", "metric-invariance", "|x³ − y³| on the additive line",
           lambda: verify.check_metric_invariance(non_invariant_metric(), n=200)),
    Mutant("gaussian-weight", "measure-invariance", "Gaussian weight as Haar measure of the line",
           _run_measure_invariance),
    Mutant("unscaled-velocity-density", "pushforward-consistency",
           "c²/(c² − t²) claimed as the image of unscaled Lebesgue", _run_pushforward),
    Mutant("half-line-measure", "quasi-invariance", "Lebesgue restricted to [0, ∞)",
           _run_quasi_invariance),
    Mutant("scaling-op", "jacobian-unimodular", "h + 2x on R^3",
           lambda: verify.check_jacobian_unimodular(scaling_op(3), n=50)),
)


def run_mutants() -> list[tuple[Mutant, verify.Report]]:
    return [(m, m.run()) for m in MUTANTS]
