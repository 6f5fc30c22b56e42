"""Print the exact return-probability ladder p_2n^(1/2n) for a group and multiset.

    python scripts/spectral_ladder.py --group free:2 --steps 60
"""

import argparse

from folnerlab import parse_group, parse_multiset
from folnerlab.spectral import closed_form_rho, return_probabilities, rho_lower_from_returns


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--group", default="free:2")
    ap.add_argument("--set", dest="multiset", default="std")
    ap.add_argument("--steps", type=int, default=40)
    ap.add_argument("--method", default="auto")
    args = ap.parse_args()

    ctx = parse_group(args.group)
    S = parse_multiset(ctx, args.multiset)
    p = return_probabilities(ctx, S, args.steps, method=args.method)
    ladder = rho_lower_from_returns(p).lower_bounds
    rho = closed_form_rho(ctx, S)
    print(f"{'n':>4} {'p_2n':>28} {'p_2n^(1/2n)':>12}")
    for n, x in enumerate(ladder, 1):
        num = p[2 * n - 1]
        txt = str(num) if len(str(num)) <= 28 else f"{float(num):.6e}"
        print(f"{n:>4} {txt:>28} {x:12.6f}")
    if rho is not None:
        print(f"closed form rho = {rho:.6f}")
        first = next((n for n, x in enumerate(ladder, 1) if x > 0.80), None)
        print(f"first n with ladder > 0.80: {first}")


if __name__ == "__main__":
    main()
