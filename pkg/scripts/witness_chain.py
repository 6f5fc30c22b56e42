"""Run the averaging chain on Z^d and print norms against (1 - k)^m.

    python scripts/witness_chain.py --dim 2 --side 10 --m 3
"""

import argparse

from folnerlab import parse_group
from folnerlab.dixmier import DixmierWitness, FinsuppFunction, adapted_box, dixmier_chain, paradoxical_witness_f2


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--side", type=int, default=10)
    ap.add_argument("--m", type=int, default=3)
    args = ap.parse_args()

    dec, w = paradoxical_witness_f2()
    print(f"free:2 paradoxical witness: sup = {w.sup}, scaled sup = {dec.scaled_H().sup()}")

    ctx = parse_group(f"zd:{args.dim}")
    S = ctx.standard_symmetric()
    h = FinsuppFunction.indicator(ctx, [ctx.identity_form])
    w0 = DixmierWitness.from_pairs(ctx, [(h, s) for s in S.elements]).normalize()
    chain = dixmier_chain(w0, args.m, lambda v: adapted_box(ctx, v.S, args.side))
    print(f"zd:{args.dim} start: sup = {w0.sup}, normalization = {w0.normalization}")
    for j, (st, nm, b) in enumerate(zip(chain.steps, chain.norms, chain.chain_bounds), 1):
        print(f"m={j}: k={st.k}  |F|={st.F_size}  ||H||={nm}  bound={b}  sup={st.sup_after}")


if __name__ == "__main__":
    main()
