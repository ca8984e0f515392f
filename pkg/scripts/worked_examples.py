"""Print the worked examples: closed-form operations and their Haar densities."""

import math

from haargroups.intervals import IntervalSet
from haargroups.measure import integrate
from haargroups.transport import arctan_group, log_group, shear_group, velocity_group


def main():
    for c in (0.5, 1.0, 3e8):
        res = velocity_group(c)
        x, y = 0.6 * c, 0.7 * c
        mass = integrate(res.measure, IntervalSet.of((0.0, c / 2)))
        print(f"velocity c={c:g}: {x:g} + {y:g} -> {res.group.op(x, y)!r}  "
              f"mass[0, c/2) = {mass!r}  (c/2)ln3 = {c / 2 * math.log(3)!r}")

    res = log_group()
    print(f"log: 2 * 3 -> {res.group.op(2.0, 3.0)!r}  mass[1, e) = {integrate(res.measure, IntervalSet.of((1.0, math.e)))!r}")

    res = arctan_group(1.0)
    print(f"arctan c=1: 0.3 + 0.2 -> {res.group.op(0.3, 0.2)!r}")

    g = shear_group(5).group
    print(f"shear:5: (1,1,1,1,1) op (2,2,2,2,2) -> {g.op((1.0,) * 5, (2.0,) * 5)}")


if __name__ == "__main__":
    main()
