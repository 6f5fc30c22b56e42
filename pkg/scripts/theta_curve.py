"""theta(p) on a tree ball against the exact oracle, plus the p_c bisection.

    python scripts/theta_curve.py --radius 12 --samples 2000 --seed 7 --workers 4
"""

import argparse
from fractions import Fraction

import numpy as np

from folnerlab import parse_group
from folnerlab.cayley import build_ball
from folnerlab.percolation import pc_estimate, theta_hat, tree_theta_oracle


def oracle_crossing(R: int, tau: float, lo=0.0, hi=1.0, tol=1e-9) -> float:
    # theta_R is increasing in p, so plain bisection on the exact recursion
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if tree_theta_oracle(3, 4, mid, R) >= tau:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--radius", type=int, default=10)
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--tau", type=float, default=0.05)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--pc", action="store_true")
    args = ap.parse_args()

    ctx = parse_group("free:2")
    ball = build_ball(ctx, ctx.standard_symmetric(), args.radius)
    print(f"ball R={args.radius}: {ball.n_vertices} vertices")
    print(f"{'p':>6} {'theta_hat':>10} {'oracle':>10} {'z':>6}")
    for p in np.linspace(0.1, 0.7, 13):
        t = theta_hat(ball, float(p), args.samples, args.seed, workers=args.workers)
        exact = tree_theta_oracle(3, 4, float(p), args.radius)
        z = (t.theta - exact) / t.wilson_sigma if t.wilson_sigma > 0 else 0.0
        print(f"{p:6.3f} {t.theta:10.4f} {exact:10.4f} {z:6.2f}")
    print(f"oracle theta at p=1/3: {float(tree_theta_oracle(3, 4, Fraction(1, 3), args.radius)):.4f}")
    print(f"oracle crossing theta = {args.tau}: p = {oracle_crossing(args.radius, args.tau):.5f}")
    if args.pc:
        est = pc_estimate(ball, args.samples, args.seed, tau=args.tau, workers=args.workers)
        print(f"pc_estimate: {est.p_c:.4f}  CI [{est.ci[0]:.4f}, {est.ci[1]:.4f}]  ({est.evaluations} evaluations)")


if __name__ == "__main__":
    main()
