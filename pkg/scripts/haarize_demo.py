"""Haar-ize a few distributions and a σ-finite measure, and show invariance numerically."""

import argparse

import numpy as np

from haargroups import verify
from haargroups.groups import base_real_line
from haargroups.haarize import haarize_probability, haarize_sigma_finite
from haargroups.intervals import IntervalSet
from haargroups.measure import distribution_from_name, integrate


def show_probability(name: str, rng, n: int):
    h = haarize_probability(distribution_from_name(name))
    g = h.group
    print(f"{g.name}: identity {g.identity!r}, escape {h.shift}")
    if h.shift is not None:
        print("  escape points " + ", ".join(f"phi({h.shift.point(k):g}) = {h.phi(h.shift.point(k)):.6f}"
                                            for k in range(3)))
    sets = verify.random_sets_in_group(g, rng, n)
    elements = list(zip(g.sample(rng, n), g.sample(rng, n)))
    r = verify.check_measure_invariance(g, h.measure, sets, elements)
    print(f"  two-sided invariance on {r.samples} sets: max residual {r.max_residual:.2e} -> {r.verdict}")


def show_sigma_finite(rng, n: int):
    _, leb = base_real_line()
    res = haarize_sigma_finite(leb)
    for a, b in ((0.0, 3.0), (-1.5, 0.5), (4.0, 4.25)):
        s = IntervalSet.of((a, b))
        print(f"sigma-finite lebesgue: mu*[{a:g}, {b:g}) = {integrate(res.measure, s, 1e-12):.12f}  "
              f"series {res.series(s):.12f}")
    sets = verify.random_interval_sets(rng, n, -2.0, 3.0)
    elements = [(float(a), float(b)) for a, b in rng.uniform(-4, 4, (n, 2))]
    r = verify.check_measure_invariance(res.group, res.measure, sets, elements)
    print(f"  two-sided invariance on {r.samples} sets: max residual {r.max_residual:.2e} -> {r.verdict}")


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--dist", nargs="*", default=["uniform", "exponential:1", "normal:0,1", "cauchy:0,1", "beta:2,3"])
    p.add_argument("--sets", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)
    for name in args.dist:
        show_probability(name, rng, args.sets)
    show_sigma_finite(rng, args.sets)


if __name__ == "__main__":
    main()
