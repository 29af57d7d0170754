#!/usr/bin/env python3
"""Sweep the imposed-conditions evidence harness over small configurations.

For each configuration of assigned point multiplicities on plane curves of
degree d, report h0 of the linear system one and two steps below d, the
Euler-characteristic bound, and h1.  Rows with h1 > 0 in range are flagged;
the output is evidence for further inspection, never a claim.
"""

import itertools
import sys

from drinfeld.field import make_tower
from drinfeld.linsys import imposed_conditions_experiment


def configurations(tower):
    zero, one = tower.zero, tower.one
    pts = [(one, zero, zero), (zero, one, zero), (zero, zero, one),
           (one, one, zero), (one, one, one)]
    yield "nodal cubic", 3, [(pts[2], 2)]
    yield "two nodes, quartic", 4, [(pts[0], 2), (pts[2], 2)]
    yield "three nodes, quartic", 4, [(pts[0], 2), (pts[1], 2), (pts[2], 2)]
    yield "two triple points, quartic", 4, [(pts[0], 3), (pts[2], 3)]
    yield "triple point, quintic", 5, [(pts[1], 3)]
    yield "four nodes, quintic", 5, [(p, 2) for p in pts[:4]]


def main() -> int:
    q = int(sys.argv[1]) if len(sys.argv) > 1 else 2
    tower = make_tower(q, 1, 1) if q in (2, 3, 5, 7) else None
    if tower is None:
        print("give a prime q (the sweep uses rational points only)")
        return 2
    header = f"{'configuration':30s} {'d':>2s} {'s':>2s} {'h0':>3s} {'chi':>4s} {'h1':>3s} flag"
    print(header)
    print("-" * len(header))
    exit_code = 0
    for name, d, conditions in configurations(tower):
        for s in range(max(0, d - 2), d):
            report = imposed_conditions_experiment(q, d, conditions, s)
            w = report.witness
            flag = "FLAG" if w["flagged"] else ""
            print(f"{name:30s} {d:2d} {s:2d} {w['h0']:3d} {w['chi']:4d} "
                  f"{w['h1']:3d} {flag}")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
