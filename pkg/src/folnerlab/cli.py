"""Command-line entry point: ``folnerlab criterion | percolate | witness``.

Exit codes: 0 certified, 3 ran but not certified, 2 usage or runtime error.
Output files are written only after a run completes.
"""

from __future__ import annotations

import argparse
import sys

from . import report as rp
from .errors import BudgetError


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="folnerlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def outputs(p, csv=False, svg=False):
        p.add_argument("--json", metavar="PATH", help="write the machine-readable report")
        if csv:
            p.add_argument("--csv", metavar="PATH", help="write the theta curve")
        if svg:
            p.add_argument("--svg", metavar="PATH", help="write the theta plot")
        p.add_argument("--quiet", action="store_true")

    c = sub.add_parser("criterion", help="certify h > sqrt(1/2) through multiset powers")
    c.add_argument("--group", required=True, help="free:k, zd:d or fpc:n1,n2,...")
    c.add_argument("--set", dest="multiset", default="std", help="multiset literal or std")
    c.add_argument("--nmax", type=int, default=12)
    c.add_argument("--return-steps", type=int, default=20)
    c.add_argument("--radius", type=int, default=6, help="ball radius for the upper-bound search")
    c.add_argument("--search-budget", type=int, default=20_000)
    c.add_argument("--box", type=int, default=20, help="box side for Z^d upper bounds")
    c.add_argument("--max-vertices", type=int, default=3_000_000, help="ball size budget")
    outputs(c)

    p = sub.add_parser("percolate", help="bond percolation on a ball")
    p.add_argument("--group", required=True)
    p.add_argument("--set", dest="multiset", default="std")
    p.add_argument("--radius", type=int, default=8)
    p.add_argument("--p", dest="ps", type=_floats, default=(), help="comma-separated p values")
    p.add_argument("--pc", action="store_true", help="estimate p_c by coupled bisection")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=None, help=f"default: ${rp.SEED_ENV} or 0")
    p.add_argument("--tau", type=float, default=0.05)
    p.add_argument("--probe-samples", type=int, default=50)
    p.add_argument("--h", type=float, default=None, help="certified h for the p_c upper bound")
    p.add_argument("--h-provenance", default="exact",
                   choices=["exact", "certified-bound", "heuristic", "monte-carlo-ci"])
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-vertices", type=int, default=3_000_000, help="ball size budget")
    outputs(p, csv=True, svg=True)

    w = sub.add_parser("witness", help="Dixmier witnesses and the averaging chain")
    w.add_argument("--paradoxical-f2", action="store_true")
    w.add_argument("--group")
    w.add_argument("--iterate", metavar="box:L")
    w.add_argument("--m", type=int, default=3)
    w.add_argument("--start", default="point", help="point or box:W")
    outputs(w)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    files = {}
    try:
        if args.command == "criterion":
            rep = rp.run_criterion(rp.CriterionConfig(
                args.group, args.multiset, args.nmax, args.return_steps,
                args.radius, args.search_budget, args.box, args.max_vertices))
        elif args.command == "percolate":
            seed = rp.default_seed() if args.seed is None else args.seed
            rep, points = rp.run_percolate(rp.PercolateRunConfig(
                args.group, args.multiset, args.radius, args.ps, args.pc, args.samples,
                seed, args.tau, args.probe_samples, args.h, args.h_provenance, args.workers,
                args.max_vertices))
            if args.csv:
                files[args.csv] = rp.theta_csv(points)
            if args.svg:
                rules = {"tau": args.tau}
                files[args.svg] = rp.theta_svg(points, rules)
        else:
            rep = rp.run_witness(rp.WitnessConfig(
                args.paradoxical_f2, args.group, args.iterate, args.m, args.start))
    except BudgetError as exc:
        print(f"error [{exc.stage or 'budget'}]: {exc}", file=sys.stderr)
        return rp.EXIT_ERROR
    except (ValueError, TypeError, ArithmeticError, IndexError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return rp.EXIT_ERROR
    if args.json:
        files[args.json] = rep.to_json()
    for path, text in files.items():
        rp.write_atomic(path, text)
    if not args.quiet:
        for line in rep.lines:
            print(line)
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
