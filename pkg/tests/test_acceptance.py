"""Acceptance gate.

Each test evaluates every part of one criterion before asserting, records a
single pass/fail line (printed in the terminal summary), then asserts.
"""

import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from folnerlab import parse_group
from folnerlab.cayley import build_ball
from folnerlab.cli import main
from folnerlab.dixmier import (
    DixmierWitness,
    FinsuppFunction,
    adapted_box,
    dixmier_chain,
    dixmier_iterate,
    paradoxical_witness_f2,
)
from folnerlab.isoperimetry import boundary_and_overlap, folner_search, mohar_bounds, phi, witness_power_search
from folnerlab.percolation import bs_pc_bound, open_edges, pc_estimate, theta_hat, tree_theta_oracle
from folnerlab.spectral import free_group_rho, return_probabilities, rho_lower_from_returns

SQRT_HALF = math.sqrt(0.5)
KESTEN = math.sqrt(3) / 2


def test_c01_exact_spectral_ladder(free2, acceptance):
    S = free2.standard_symmetric()
    t0 = time.perf_counter()
    p = return_probabilities(free2, S, 40, method="first-passage")
    oracle = return_probabilities(free2, S, 16, method="convolution")
    ladder = rho_lower_from_returns(p).lower_bounds
    elapsed = time.perf_counter() - t0
    exact = p[1] == Fraction(1, 4) and p[3] == Fraction(7, 64)
    agree = p[:16] == oracle
    below = all(x <= KESTEN + 1e-12 for x in ladder)
    reaches = ladder[19] > 0.80
    ok = exact and agree and below and reaches and elapsed < 60
    acceptance(1, ok, f"p2={p[1]} p4={p[3]} routes agree to N=16: {agree}; "
                      f"ladder(n=20)={ladder[19]:.5f} (need > 0.80, bound {KESTEN:.5f}); {elapsed:.1f}s")
    assert exact and agree and below and elapsed < 60
    assert reaches, f"p_40^(1/40) = {ladder[19]:.6f} does not exceed 0.80"


def test_c02_tree_isoperimetry(free2, tree_ball_8, acceptance):
    t0 = time.perf_counter()
    res = folner_search(tree_ball_8, mode="exhaustive", max_size=8, connected=True)
    elapsed = time.perf_counter() - t0
    expected = {n: Fraction(2 * n + 2, 4 * n) for n in range(1, 9)}
    ok = res.best.phi == Fraction(18, 32) and res.per_size == expected and elapsed < 120
    acceptance(2, ok, f"min phi={res.best.phi} at |F|={res.best.size}; per-size match: "
                      f"{res.per_size == expected}; {elapsed:.1f}s")
    assert ok


def test_c03_mohar_consistency(acceptance):
    rho, h = free_group_rho(2), 0.5
    eq = abs(math.sqrt(1 - h * h) - rho)
    lower = mohar_bounds(rho_upper=rho, size=4).lower
    upper = mohar_bounds(rho_lower=rho).upper
    ok = eq < 1e-12 and abs(lower - 0.17863) < 5e-6 and lower <= h and abs(upper - h) < 1e-12
    acceptance(3, ok, f"|sqrt(1-h^2)-rho|={eq:.1e}; (1-rho)4/3={lower:.5f} <= 1/2")
    assert ok


def test_c04_criterion_pipeline(free2, acceptance):
    t0 = time.perf_counter()
    w = witness_power_search(free2, free2.standard_symmetric(), free_group_rho(2), 12)
    trail = dict(w.trail)
    code = main(["criterion", "--group", "free:2", "--quiet"])
    elapsed = time.perf_counter() - t0
    h9, h8 = w.bounds.lower, trail[8].lower
    ok = (w.n == 9 and h9 > SQRT_HALF and abs(h9 - 0.7262) < 5e-4 and h8 <= SQRT_HALF
          and abs(h8 - 0.6836) < 5e-4 and code == 0 and elapsed < 10)
    acceptance(4, ok, f"n={w.n} h_lower={h9:.6f}; n=8 gives {h8:.6f}; exit {code}; {elapsed:.1f}s")
    assert ok


def test_c05_percolation_vs_oracle(tree_ball_12, acceptance):
    t0 = time.perf_counter()
    rows, within = [], True
    for p in (0.2, Fraction(1, 3), 0.5):
        t = theta_hat(tree_ball_12, float(p), 2000, 7)
        exact = float(tree_theta_oracle(3, 4, p, 12))
        z = abs(t.theta - exact) / t.wilson_sigma
        within &= z <= 3
        rows.append(f"p={float(p):.3f}: {z:.2f} sigma")
    est = pc_estimate(tree_ball_12, 2000, 7)
    bound = bs_pc_bound(4, 0.5).value
    elapsed = time.perf_counter() - t0
    in_range = 0.30 <= est.p_c <= 0.38
    ok = within and in_range and abs(bound - 1 / 3) < 1e-15 and elapsed < 300
    acceptance(5, ok, f"{'; '.join(rows)}; pc_estimate={est.p_c:.4f} (need [0.30, 0.38]); "
                      f"bound={bound:.6f}; {elapsed:.0f}s")
    assert within and abs(bound - 1 / 3) < 1e-15 and elapsed < 300
    assert in_range, f"pc_estimate {est.p_c:.4f} outside [0.30, 0.38]"


def test_c06_coupled_monotonicity(acceptance):
    balls = [
        build_ball(parse_group("free:2"), parse_group("free:2").standard_symmetric(), 4),
        build_ball(parse_group("zd:2"), parse_group("zd:2").standard_symmetric(), 6),
        build_ball(parse_group("fpc:2,3"), parse_group("fpc:2,3").standard_symmetric(), 8),
    ]
    grid = np.linspace(0.0, 1.0, 11)
    violations = 0
    for ball in balls:
        for sample in range(500):
            prev = open_edges(ball, grid[0], 3, sample)
            for p in grid[1:]:
                cur = open_edges(ball, p, 3, sample)
                violations += int(np.count_nonzero(prev & ~cur))
                prev = cur
    ok = violations == 0
    acceptance(6, ok, f"{violations} inclusion violations over 500 samples x 3 groups x 11 p-values")
    assert ok


def test_c07_dixmier_witness(acceptance):
    dec, w = paradoxical_witness_f2()
    checks = dec.check_partitions()
    scaled = dec.scaled_H().sup()
    s_t = dec.tarski_count
    ok = (all(checks.values()) and w.sup == Fraction(-1, 4) and scaled == Fraction(-1, 2)
          and scaled == -Fraction(1, s_t - 2))
    acceptance(7, ok, f"checks {checks}; sup H={w.sup}; scaled sup={scaled}")
    assert ok


def test_c08_iteration_chain(zd1, zd2, acceptance):
    h = FinsuppFunction.indicator(zd1, [(i,) for i in range(20)], Fraction(1, 4))
    w1 = DixmierWitness.from_pairs(zd1, [(h, (1,))])
    step = dixmier_iterate(w1, phi(zd1, w1.S, [(i,) for i in range(10)]))
    one = (step.k == Fraction(9, 10) and step.norm_H == Fraction(1, 40)
           and step.bound == (1 - step.k) * w1.normalization == Fraction(1, 20))

    S = zd2.standard_symmetric()
    pt = FinsuppFunction.indicator(zd2, [(0, 0)])
    w2 = DixmierWitness.from_pairs(zd2, [(pt, s) for s in S.elements]).normalize()
    chain = dixmier_chain(w2, 3, lambda v: adapted_box(zd2, v.S, 10))
    k = chain.steps[-1].k
    two = (w2.normalization == 1 and all(s.k == Fraction(9, 10) for s in chain.steps)
           and chain.norms[-1] <= (1 - k) ** 3 and chain.chain_bounds[-1] == (1 - k) ** 3)
    ok = one and two
    acceptance(8, ok, f"zd1: ||H1||={step.norm_H} <= {step.bound} (k={step.k}); "
                      f"zd2: norms {[str(n) for n in chain.norms]} vs (1-k)^3={(1 - k) ** 3}")
    assert ok


def test_c09_boundary_identity(acceptance):
    rng = random.Random(2024)
    failures, total = 0, 0
    for spec, radius in (("free:2", 3), ("zd:2", 4), ("fpc:2,3", 6)):
        ctx = parse_group(spec)
        S = ctx.standard_symmetric()
        pool = list(build_ball(ctx, S, radius).points)
        for _ in range(334 if spec != "fpc:2,3" else 332):
            F = set(rng.sample(pool, rng.randint(1, 25)))
            s = rng.choice(pool)
            sF = {ctx.mul_forms(s, x) for x in F}
            inter, diff = len(sF & F), len(sF - F)
            failures += (inter + diff != len(F)) or (boundary_and_overlap(ctx, s, F) != (diff, inter))
            total += 1
    ok = failures == 0 and total == 1000
    acceptance(9, ok, f"{failures} failures over {total} random (F, s)")
    assert ok


def _percolate(tmp_path, tag, workers):
    csv, js = tmp_path / f"{tag}.csv", tmp_path / f"{tag}.json"
    code = main(["percolate", "--group", "free:2", "--radius", "6", "--p", "0.3,0.4,0.5",
                 "--pc", "--samples", "300", "--seed", "7", "--probe-samples", "10",
                 "--workers", str(workers), "--csv", str(csv), "--json", str(js), "--quiet"])
    return code, csv.read_bytes(), js.read_bytes()


def test_c10_determinism(tmp_path, acceptance):
    runs = [_percolate(tmp_path, f"r{i}", w) for i, w in enumerate((1, 1, 4))]
    same = all(r == runs[0] for r in runs[1:])
    wit = []
    for i in range(2):
        out = tmp_path / f"w{i}.json"
        main(["witness", "--group", "zd:2", "--iterate", "box:10", "--m", "2", "--json", str(out), "--quiet"])
        wit.append(out.read_bytes())
    ok = same and runs[0][0] == 3 and wit[0] == wit[1]
    acceptance(10, ok, f"CSV/JSON identical across runs and workers 1/4: {same}; witness JSON stable: {wit[0] == wit[1]}")
    assert ok
