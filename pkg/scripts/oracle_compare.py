"""Compare the solver with brute force on random one-variable catalog problems.

    python scripts/oracle_compare.py [--count 200] [--seed 2024] [--grid 100000]

Each problem has one continuous variable, a catalog of at most ten items with
one or two properties and polynomial constraints of degree at most three. The
reference enumerates the items and scans an x-grid together with the real
roots of every constraint and of the objective's derivative.
"""

import argparse
import math
import os
import random
import statistics
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "tests"))
from oracle import brute_force, random_problem  # noqa: E402

from catopt.solver import SolverConfig, solve  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--grid", type=int, default=100_000)
    ap.add_argument("--epsilon", type=float, default=1e-6)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    cfg = SolverConfig(epsilon=args.epsilon)
    gaps, nodes, times = [], [], []
    mismatches = infeasible = 0
    for k in range(args.count):
        op = random_problem(rng)
        t0 = time.perf_counter()
        r = solve(op.problem, cfg)
        times.append(time.perf_counter() - t0)
        nodes.append(r.stats.nodes)
        o = brute_force(op, args.grid)
        tol = args.epsilon + 2 * o.step * o.lipschitz
        if r.status == "infeasible":
            infeasible += 1
            ok = o.f_min == math.inf
        else:
            ok = o.f_min_relaxed - tol <= r.f_best <= o.f_min + tol
            gaps.append(r.f_best - o.f_min)
        if not ok:
            mismatches += 1
            print(f"problem {k}: solver {r.status} {r.f_best}, oracle {o.f_min} (tolerance {tol:.3g})")
    print(f"{args.count} problems, {infeasible} infeasible, {mismatches} mismatches")
    if gaps:
        print(f"f_solver - f_oracle: max {max(gaps):.3g}, min {min(gaps):.3g}")
    print(f"nodes: median {statistics.median(nodes)}, max {max(nodes)}")
    print(f"solve time: total {sum(times):.1f}s, max {max(times):.2f}s")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
