import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from folnerlab import parse_group
from folnerlab.cayley import build_ball
from folnerlab.dixmier import (
    DixmierWitness,
    FinsuppFunction,
    PrefixFunction,
    adapted_box,
    average_convolve,
    build_H,
    class_count,
    dichotomy_check,
    dixmier_chain,
    dixmier_iterate,
    dumps_witness,
    paradoxical_witness_f2,
    sup_exact,
    translate,
    witness_from_json,
)
from folnerlab.errors import BudgetError, CoercionError, ContextMismatchError, InvariantViolation
from folnerlab.isoperimetry import folner_search, phi


def test_class_counts(free2, fpc23):
    assert class_count(free2, 2) == len(free2.words_up_to(2)) == 17
    assert class_count(fpc23, 5) == len(fpc23.words_up_to(5))


def test_translate_examples(free2, zd1):
    A_minus = PrefixFunction.cone_indicator(free2, "a^-1")
    f = translate(free2, "a", A_minus)
    b = build_ball(free2, free2.standard_symmetric(), 3)
    for x in b.points:
        expect = 0 if (x and x[0] == 1) else 1  # a.A- = all words not starting with a
        assert f(x) == expect
    assert translate(free2, "e", A_minus) is A_minus
    one = FinsuppFunction.indicator(zd1, [(0,)])
    assert translate(zd1, (1,), one) == FinsuppFunction.indicator(zd1, [(1,)])


def random_prefix(ctx, rng, depth=2):
    words = ctx.words_up_to(depth)
    return PrefixFunction.build(ctx, depth, {w: Fraction(rng.randint(-3, 3), rng.randint(1, 4)) for w in rng.sample(words, 5)})


def random_finsupp(ctx, rng, radius=3):
    pts = ctx.words_up_to(radius) if ctx.has_prefix_structure else [(x,) * ctx.rank for x in range(-radius, radius + 1)]
    return FinsuppFunction.build(ctx, {x: Fraction(rng.randint(-3, 3), rng.randint(1, 4)) for x in rng.sample(pts, 4)})


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_translation_is_action(free2, seed):
    rng = random.Random(seed)
    f = random_prefix(free2, rng)
    g, h = (rng.choice(free2.words_up_to(2)) for _ in range(2))
    gh = free2.mul_forms(g, h)
    assert translate(free2, gh, f) == translate(free2, g, translate(free2, h, f))


def test_sup_examples(free2, zd1):
    assert sup_exact(FinsuppFunction.zero(zd1)) == 0
    assert sup_exact(PrefixFunction.cone_indicator(free2, "a^-1")) == 1
    neg = FinsuppFunction.indicator(zd1, [(0,)], -1)
    assert sup_exact(neg) == 0  # zero attained off the support
    assert PrefixFunction.constant(free2, -2).sup() == -2
    finite = parse_group("fpc:3")
    full = FinsuppFunction.indicator(finite, [(), ((0, 1),), ((0, 2),)], -1)
    assert full.sup() == -1


def test_build_H_examples(zd1, free2):
    h = FinsuppFunction.indicator(zd1, [(0,)], 3)
    assert build_H([(h, (0,))]).is_zero()
    n = 7
    box = FinsuppFunction.indicator(zd1, [(i,) for i in range(n)], Fraction(1, 4))
    H = build_H([(box, (1,))])
    assert H == FinsuppFunction.build(zd1, {(0,): Fraction(1, 4), (n,): Fraction(-1, 4)})
    assert H.sup() == Fraction(1, 4)


def test_build_H_mixed_representations(free2, zd1):
    p = PrefixFunction.cone_indicator(free2, "a")
    f = FinsuppFunction.indicator(free2, ["b", "e"])
    H = build_H([(p, "b"), (f, "a")])
    assert isinstance(H, PrefixFunction)
    assert H == build_H([(p, "b")]) + build_H([(f.to_prefix(), "a")])
    with pytest.raises(ContextMismatchError):
        build_H([(p, "b"), (FinsuppFunction.zero(zd1), (1,))])
    with pytest.raises(CoercionError):
        FinsuppFunction.zero(zd1).to_prefix()


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_build_H_linear(free2, seed):
    rng = random.Random(seed)
    pairs = [(random_prefix(free2, rng) if rng.random() < 0.5 else random_finsupp(free2, rng), rng.choice(free2.words_up_to(2))) for _ in range(4)]
    assert build_H(pairs) == build_H(pairs[:2]) + build_H(pairs[2:])


def test_depth_cap(free2):
    f = PrefixFunction.cone_indicator(free2, "a^5")
    with pytest.raises(BudgetError):
        translate(free2, "b^8", f)


def test_paradoxical_f2():
    dec, w = paradoxical_witness_f2()
    assert dec.check_partitions() == {"indicators": True, "partition": True, "gamma_cover": True, "eta_cover": True}
    ctx = w.ctx
    A1, A2 = dec.A
    one = PrefixFunction.constant(ctx, 1)
    assert A1 + translate(ctx, "a", A2) == one
    assert w.normalization == 1
    assert w.sup == Fraction(-1, 4) and w.epsilon == Fraction(1, 4)
    assert w.epsilon == Fraction(1, 2) / (dec.tarski_count - 2)
    assert dec.scaled_H().sup() == Fraction(-1, dec.tarski_count - 2) == Fraction(-1, 2)


def test_average_convolve_examples(zd1):
    f = FinsuppFunction.build(zd1, {(0,): 1, (20,): -1})
    F = [(i,) for i in range(10)]
    g = average_convolve(F, f)
    expect = FinsuppFunction.build(zd1, {**{(i,): Fraction(1, 10) for i in range(10)}, **{(20 + i,): Fraction(-1, 10) for i in range(10)}})
    assert g == expect and g.norm() == Fraction(1, 10)
    assert average_convolve([(0,)], f) == f
    with pytest.raises(ValueError):
        average_convolve([], f)


@pytest.mark.parametrize("spec", ["free:2", "zd:1", "fpc:2,3"])
@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32), prefix=st.booleans())
def test_sup_contraction(spec, seed, prefix):
    ctx = parse_group(spec)
    rng = random.Random(seed)
    f = random_prefix(ctx, rng) if (prefix and ctx.has_prefix_structure) else random_finsupp(ctx, rng)
    pool = ctx.words_up_to(2) if ctx.has_prefix_structure else [(i,) for i in range(-4, 5)]
    F = rng.sample(pool, rng.randint(1, 5))
    assert average_convolve(F, f).sup() <= f.sup()


def test_iterate_zd1_worked(zd1):
    h = FinsuppFunction.indicator(zd1, [(i,) for i in range(20)], Fraction(1, 4))
    w = DixmierWitness.from_pairs(zd1, [(h, (1,))])
    assert w.normalization == Fraction(1, 2)
    F = phi(zd1, w.S, [(i,) for i in range(10)])
    for regroup in (True, False):
        st_ = dixmier_iterate(w, F, regroup=regroup)
        assert st_.k == Fraction(9, 10)
        assert st_.norm_H == Fraction(1, 40) <= st_.bound == Fraction(1, 20)


def test_iterate_identity_F(zd1):
    h = FinsuppFunction.indicator(zd1, [(0,), (1,)], Fraction(1, 4))
    w = DixmierWitness.from_pairs(zd1, [(h, (1,))])
    st_ = dixmier_iterate(w, phi(zd1, w.S, [(0,)]), regroup=False)
    assert st_.witness.H == w.H and st_.norm_H <= st_.bound


def test_iterate_rejects_wrong_multiset(zd1):
    h = FinsuppFunction.indicator(zd1, [(0,)])
    w = DixmierWitness.from_pairs(zd1, [(h, (1,))])
    with pytest.raises(ValueError):
        dixmier_iterate(w, phi(zd1, zd1.standard_symmetric(), [(0,), (1,)]))


@pytest.mark.parametrize("start", ["point", "box"])
def test_chain_zd2(zd2, start):
    S = zd2.standard_symmetric()
    pts = [(0, 0)] if start == "point" else [(x, y) for x in range(3) for y in range(3)]
    h = FinsuppFunction.indicator(zd2, pts)
    w = DixmierWitness.from_pairs(zd2, [(h, s) for s in S.elements]).normalize()
    ch = dixmier_chain(w, 3, lambda v: adapted_box(zd2, v.S, 10))
    assert [s.k for s in ch.steps] == [Fraction(9, 10)] * 3
    assert ch.chain_bounds[-1] == Fraction(1, 1000)
    assert all(n <= b for n, b in zip(ch.norms, ch.chain_bounds))
    dichotomy_check(w.epsilon, ch.chain_bounds[-1])


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_zd_witnesses_never_negative(zd1, seed):
    rng = random.Random(seed)
    pairs = [(random_finsupp(zd1, rng), (rng.randint(-3, 3),)) for _ in range(rng.randint(1, 4))]
    w = DixmierWitness.from_pairs(zd1, pairs)
    assert w.sup >= 0


def test_dichotomy_fires():
    with pytest.raises(InvariantViolation):
        dichotomy_check(Fraction(1, 4), Fraction(1, 1000))
    dichotomy_check(Fraction(1, 4), Fraction(1, 2))


def test_paradoxical_survives_iteration(free2):
    dec, w = paradoxical_witness_f2()
    ball = build_ball(free2, w.S, 6)
    F = folner_search(ball, w.S, max_size=5).best
    st_ = dixmier_iterate(w, F)
    assert 1 - st_.k >= w.epsilon
    dichotomy_check(w.epsilon, 1 - st_.k)
    assert st_.norm_H <= st_.bound


def test_json_round_trip(zd1):
    _, w = paradoxical_witness_f2()
    text = dumps_witness(w)
    back = witness_from_json(json.loads(text))
    assert dumps_witness(back) == text and back.H == w.H
    assert json.loads(text)["sup"] == "-1/4"
    h = FinsuppFunction.indicator(zd1, [(0,), (3,)], Fraction(2, 3))
    wz = DixmierWitness.from_pairs(zd1, [(h, (2,))])
    assert dumps_witness(witness_from_json(json.loads(dumps_witness(wz)))) == dumps_witness(wz)
