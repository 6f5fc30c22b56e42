from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from folnerlab import GeneratorMultiset, inv, mul, multiset_power, parse_group, parse_multiset, symmetrize
from folnerlab.errors import BudgetError, ContextMismatchError, SpecParseError
from folnerlab.groups import parse_word
from folnerlab.spectral import WalkMeasure, convolve_step

CONTEXTS = ["free:2", "free:3", "zd:2", "fpc:2,3", "fpc:3,3,4"]


def words(ctx, max_len=12):
    letters = [g for g in ctx.standard_symmetric().support]
    return st.lists(st.sampled_from(letters), max_size=max_len).map(
        lambda xs: _product(ctx, xs)
    )


def _product(ctx, xs):
    g = ctx.identity()
    for x in xs:
        g = g * x
    return g


def test_free_cancellation(free2):
    a, b = free2.generators()
    assert (a * b) * b.inverse() == a
    assert a * a.inverse() == free2.identity()


def test_zd_addition(zd2):
    assert mul(zd2, zd2.element((1, 2)), zd2.element((3, 4))) == zd2.element((4, 6))
    assert inv(zd2, zd2.element((3, -1))) == zd2.element((-3, 1))


def test_inverse_of_word(free2):
    g = free2.element("ab")
    assert inv(free2, g) == free2.element("b^-1a^-1")
    assert inv(free2, free2.identity()) == free2.identity()


def test_context_mismatch(free2, zd2):
    with pytest.raises(ContextMismatchError):
        mul(free2, free2.identity(), zd2.identity())
    with pytest.raises(ContextMismatchError):
        inv(zd2, free2.identity())


def test_fpc_reduces_exponents(fpc23):
    a, b = fpc23.generators()
    assert a * a == fpc23.identity()
    assert b * b * b == fpc23.identity()
    assert str(b * b) == "b^2"
    assert len(a * b * a) == 3


@pytest.mark.parametrize("spec", CONTEXTS)
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_group_axioms(spec, data):
    ctx = parse_group(spec)
    g, h, k = (data.draw(words(ctx)) for _ in range(3))
    e = ctx.identity()
    assert (g * h) * k == g * (h * k)
    assert e * g == g == g * e
    assert g * g.inverse() == e
    assert g.inverse().inverse() == g
    assert len(g * h) <= len(g) + len(h)
    assert ctx.element(str(g)) == g


def test_symmetrize_examples(free2):
    S = parse_multiset(free2, "[a, b]")
    assert symmetrize(S).spec() == "[a, b, a^-1, b^-1]"
    T = symmetrize(parse_multiset(free2, "[a, a^-1]"))
    assert T.multiplicity("a") == 2 and T.multiplicity("a^-1") == 2
    I = symmetrize(parse_multiset(free2, "[e]"))
    assert I.size == 2 and I.multiplicity("e") == 2


def test_weights_sum_to_one(free2):
    S = parse_multiset(free2, "[a, a, b^-1, e]")
    assert sum(S.weights().values()) == 1
    assert S.weights()[free2.element("a")] == Fraction(1, 2)


def test_power_free2(free2):
    P = multiset_power(free2, free2.standard_symmetric(), 2)
    w = P.weights()
    assert P.size == 16
    assert w[free2.identity()] == Fraction(4, 16)
    others = [g for g in w if g != free2.identity()]
    assert len(others) == 12 and all(len(g) == 2 and w[g] == Fraction(1, 16) for g in others)


def test_power_zd1(zd1):
    P = multiset_power(zd1, zd1.standard_symmetric(), 2)
    assert P.weights() == {
        zd1.element((2,)): Fraction(1, 4),
        zd1.element((0,)): Fraction(1, 2),
        zd1.element((-2,)): Fraction(1, 4),
    }


def test_power_one_is_collapsed_copy(fpc23):
    S = parse_multiset(fpc23, "[a, b, b^2, b]")
    P = multiset_power(fpc23, S, 1)
    assert P.is_collapsed and P.count_map == S.count_map and P.size == S.size


def test_power_budget(free2):
    with pytest.raises(BudgetError):
        multiset_power(free2, free2.standard_symmetric(), 8, max_support=100)


@pytest.mark.parametrize("spec", ["free:2", "zd:2", "fpc:2,3"])
@settings(max_examples=25, deadline=None)
@given(data=st.data())
def test_power_matches_convolution(spec, data):
    ctx = parse_group(spec)
    support = ctx.standard_symmetric().support + [ctx.identity()]
    entries = data.draw(st.lists(st.sampled_from(support), min_size=1, max_size=6))
    S = GeneratorMultiset.from_elements(ctx, entries)
    n = data.draw(st.integers(1, 4))
    P = multiset_power(ctx, S, n)
    assert sum(P.weights().values()) == 1
    mu = WalkMeasure.delta(ctx)
    for _ in range(n):
        mu = convolve_step(ctx, mu, WalkMeasure.uniform(S))
    assert {g.form: w for g, w in P.weights().items()} == mu.weights


@pytest.mark.parametrize("n", [1, 3, 6])
def test_power_weights_exact_sum(free2, n):
    S = parse_multiset(free2, "[a, a^-1, b, b^-1, e, a]")
    assert sum(multiset_power(free2, S, n).weights().values()) == 1


def test_parsers(free2, zd2):
    assert parse_multiset(free2, "std").spec() == "[a, a^-1, b, b^-1]"
    assert parse_multiset(free2, "[a, a^-1, b, b^-1]^2").size == 16
    assert parse_word(zd2, "(1,-2)") == (1, -2)
    assert parse_word(free2, "a^2b^-1") == (1, 1, -2)
    for bad in ["free:", "zd:1,2", "fpc:1", "lie:3"]:
        with pytest.raises(SpecParseError):
            parse_group(bad)
    with pytest.raises(SpecParseError):
        parse_multiset(free2, "[a, q]")
