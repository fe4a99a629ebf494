"""Command-line front end: ``catopt --problem FILE [options]``.

Exit codes: 0 optimal, 1 infeasible, 2 limit reached, 64 usage error,
65 unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .interval import fmt_float
from .problemfile import ProblemFileError, load_problem
from .solver import BRANCHING, Result, SolverConfig, solve
from .trace import emit_plot, emit_trace_json, emit_trace_text

EXIT_OPTIMAL, EXIT_INFEASIBLE, EXIT_LIMIT = 0, 1, 2
EXIT_USAGE, EXIT_DATAERR = 64, 65

log = logging.getLogger("catopt")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="catopt", description="Global optimization with catalog-valued variables.")
    p.add_argument("--problem", required=True, help="problem file")
    p.add_argument("--epsilon", type=float, default=1e-6, help="optimality tolerance (default 1e-6)")
    p.add_argument("--explore", choices=("best", "depth", "breadth"), default="best")
    p.add_argument("--branch", choices=BRANCHING, default="largest")
    p.add_argument("--branch-override", default="",
                   help="comma-separated variables to branch on first (testing aid)")
    p.add_argument("--upper-bound", choices=("enumerate", "assigned"), default="enumerate",
                   help="'assigned' only looks for incumbents once each catalog is down to one item")
    p.add_argument("--trace", choices=("text", "json", "off"), default="off")
    p.add_argument("--trace-file", default=None, help="write the trace here instead of stdout")
    p.add_argument("--plot", default=None, metavar="DIR", help="write one SVG per phase into DIR")
    p.add_argument("--max-nodes", type=int, default=100_000)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--seed", type=int, default=None, help="reserved; the solver is deterministic")
    return p


def format_result(result: Result, names) -> str:
    if result.status == "infeasible":
        return "infeasible"
    inc = result.incumbent
    head = "optimal" if result.status == "optimal" else "limit"
    if inc is None:
        return f"{head} no incumbent, lower bound={fmt_float(result.lower_bound)}"
    assign = " ".join(f"{n}={fmt_float(v)}" for n, v in zip(names, inc.point))
    items = ", ".join(f"item {i}" for i in inc.items)
    line = f"{head} f*={fmt_float(result.f_best)} at {assign}"
    if items:
        line += f" ({items})"
    if result.status == "limit":
        line += f" lower bound={fmt_float(result.lower_bound)}"
    return line


def run(argv=None) -> int:
    logging.basicConfig(format="%(levelname)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        override = tuple(v.strip() for v in args.branch_override.split(",") if v.strip())
        if args.trace == "off" and args.trace_file:
            raise UsageError("--trace-file needs --trace text or --trace json")
        if args.max_nodes < 1:
            raise UsageError("--max-nodes must be positive")
        cfg = SolverConfig(epsilon=args.epsilon, explore=args.explore, branch=args.branch,
                           branch_override=override, upper_bounding=args.upper_bound,
                           max_nodes=args.max_nodes, time_limit=args.time_limit)
    except UsageError as exc:
        print(f"catopt: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"catopt: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        problem = load_problem(args.problem)
    except OSError as exc:
        print(f"catopt: cannot read {args.problem!r}: {exc.strerror}", file=sys.stderr)
        return EXIT_DATAERR
    except ProblemFileError as exc:
        print(f"catopt: {exc}", file=sys.stderr)
        return EXIT_DATAERR
    unknown = [v for v in override if v not in problem.names]
    if unknown:
        print(f"catopt: usage error: --branch-override names unknown variable {unknown[0]!r}",
              file=sys.stderr)
        return EXIT_USAGE

    result = solve(problem, cfg)

    if args.trace != "off":
        text = emit_trace_text(result.trace) if args.trace == "text" else emit_trace_json(result.trace)
        if args.trace_file:
            with open(args.trace_file, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    if args.plot:
        for cc in problem.catalogs:
            target = args.plot if len(problem.catalogs) == 1 else os.path.join(args.plot, cc.name)
            emit_plot(result.trace, cc, problem.names, target)

    print(format_result(result, problem.names))
    print(f"nodes: {result.stats.nodes}")
    return {"optimal": EXIT_OPTIMAL, "infeasible": EXIT_INFEASIBLE}.get(result.status, EXIT_LIMIT)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
