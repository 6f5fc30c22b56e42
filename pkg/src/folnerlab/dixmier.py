"""Exact bounded functions on groups and Dixmier witnesses.

Two closed representations are provided:

* :class:`PrefixFunction` (free and free-product families): the value at x
  depends only on the first ``min(|x|, depth)`` letters of its normal form.
  A stored word shorter than ``depth`` is a single point; a word of length
  exactly ``depth`` stands for itself and every reduced extension.
* :class:`FinsuppFunction` (any family): finitely supported, zero elsewhere.

Both are closed under left translation ``(g.f)(x) = f(g^-1 x)``, sums and
rational scaling, and both admit an exact supremum over the whole group.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Sequence

from .errors import BudgetError, CoercionError, ContextMismatchError, InvariantViolation
from .groups import Form, GeneratorMultiset, GroupContext, GroupElement, parse_group, parse_word
from .isoperimetry import FolnerCandidate, phi

DEPTH_CAP = 12
WORD_BUDGET = 2_000_000


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _form(ctx: GroupContext, g) -> Form:
    return ctx.element(g).form


def words_of_length(ctx: GroupContext, L: int) -> int:
    """Number of reduced words of length exactly L."""
    if L == 0:
        return 1
    if ctx.family == "free":
        k = ctx.rank
        return 2 * k * (2 * k - 1) ** (L - 1)
    if ctx.family != "fpc":
        raise CoercionError("prefix words exist only for free families")
    n = ctx.params
    c = [m - 1 for m in n]
    for _ in range(L - 1):
        tot = sum(c)
        c = [(m - 1) * (tot - ci) for m, ci in zip(n, c)]
    return sum(c)


def class_count(ctx: GroupContext, depth: int) -> int:
    """Number of prefix classes (points plus cones) at the given depth."""
    return sum(words_of_length(ctx, L) for L in range(depth + 1))


class BoundedFunction:
    """Common arithmetic for the two representations."""

    ctx: GroupContext

    def __call__(self, x) -> Fraction:
        raise NotImplementedError

    def sup(self) -> Fraction:
        raise NotImplementedError

    def inf(self) -> Fraction:
        return -(-self).sup()

    def norm(self) -> Fraction:
        """l-infinity norm."""
        return max(self.sup(), -self.inf())

    def translate(self, g) -> "BoundedFunction":
        raise NotImplementedError

    def scale(self, c) -> "BoundedFunction":
        raise NotImplementedError

    def _combine(self, other, sign) -> "BoundedFunction":
        raise NotImplementedError

    def __add__(self, other):
        a, b = coerce_pair(self, other)
        return a._combine(b, 1)

    def __sub__(self, other):
        a, b = coerce_pair(self, other)
        return a._combine(b, -1)

    def __neg__(self):
        return self.scale(-1)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, BoundedFunction):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def is_zero(self) -> bool:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class FinsuppFunction(BoundedFunction):
    ctx: GroupContext
    values: dict = field(default_factory=dict)  # form -> nonzero Fraction

    @classmethod
    def build(cls, ctx: GroupContext, values) -> "FinsuppFunction":
        out = {}
        items = values.items() if isinstance(values, dict) else values
        for x, v in items:
            v = _frac(v)
            if v:
                out[_form(ctx, x)] = out.get(_form(ctx, x), 0) + v
        return cls(ctx, {k: v for k, v in out.items() if v})

    @classmethod
    def indicator(cls, ctx: GroupContext, points: Iterable, value=1) -> "FinsuppFunction":
        v = _frac(value)
        return cls(ctx, {_form(ctx, x): v for x in points} if v else {})

    @classmethod
    def zero(cls, ctx: GroupContext) -> "FinsuppFunction":
        return cls(ctx, {})

    def __call__(self, x) -> Fraction:
        return self.values.get(_form(self.ctx, x), Fraction(0))

    def sup(self) -> Fraction:
        m = max(self.values.values(), default=None)
        order = self.ctx.order
        has_zero = order is None or len(self.values) < order
        if m is None:
            return Fraction(0)
        return max(m, Fraction(0)) if has_zero else m

    def translate(self, g) -> "FinsuppFunction":
        s = _form(self.ctx, g)
        if s == self.ctx.identity_form:
            return self
        left = self.ctx.left_multiplier(s)
        return FinsuppFunction(self.ctx, {left(x): v for x, v in self.values.items()})

    def scale(self, c) -> "FinsuppFunction":
        c = _frac(c)
        if not c:
            return FinsuppFunction(self.ctx, {})
        return FinsuppFunction(self.ctx, {x: c * v for x, v in self.values.items()})

    def _combine(self, other, sign):
        out = dict(self.values)
        for x, v in other.values.items():
            w = out.get(x, 0) + sign * v
            if w:
                out[x] = w
            else:
                out.pop(x, None)
        return FinsuppFunction(self.ctx, out)

    def is_zero(self) -> bool:
        return not self.values

    @property
    def support(self) -> list[Form]:
        return sorted(self.values)

    def to_prefix(self) -> "PrefixFunction":
        if not self.ctx.has_prefix_structure:
            raise CoercionError(f"{self.ctx} has no prefix structure")
        depth = max((len(x) for x in self.values), default=-1) + 1
        return PrefixFunction(self.ctx, depth, dict(self.values))


@dataclass(frozen=True, eq=False)
class PrefixFunction(BoundedFunction):
    ctx: GroupContext
    depth: int
    table: dict = field(default_factory=dict)  # word -> nonzero Fraction

    def __post_init__(self):
        if not self.ctx.has_prefix_structure:
            raise CoercionError(f"{self.ctx} has no prefix structure")
        if self.depth > DEPTH_CAP:
            raise BudgetError(f"prefix depth {self.depth} exceeds cap {DEPTH_CAP}", stage="dixmier")
        for w in self.table:
            if len(w) > self.depth:
                raise ValueError(f"word {w!r} longer than depth {self.depth}")

    @classmethod
    def build(cls, ctx: GroupContext, depth: int, values) -> "PrefixFunction":
        items = values.items() if isinstance(values, dict) else values
        table = {}
        for w, v in items:
            v = _frac(v)
            if v:
                table[_form(ctx, w)] = v
        return cls(ctx, depth, table)

    @classmethod
    def cone_indicator(cls, ctx: GroupContext, word, value=1) -> "PrefixFunction":
        """Indicator of all reduced words beginning with ``word``."""
        w = _form(ctx, word)
        return cls.build(ctx, len(w), {w: value})

    @classmethod
    def constant(cls, ctx: GroupContext, value) -> "PrefixFunction":
        return cls.build(ctx, 0, {(): value})

    def __call__(self, x) -> Fraction:
        x = x if isinstance(x, tuple) else _form(self.ctx, x)
        return self.table.get(x[: self.depth], Fraction(0))

    def sup(self) -> Fraction:
        m = max(self.table.values(), default=None)
        if m is None:
            return Fraction(0)
        if len(self.table) < class_count(self.ctx, self.depth):
            return max(m, Fraction(0))
        return m

    def is_zero(self) -> bool:
        return not self.table

    def scale(self, c) -> "PrefixFunction":
        c = _frac(c)
        if not c:
            return PrefixFunction(self.ctx, self.depth, {})
        return PrefixFunction(self.ctx, self.depth, {w: c * v for w, v in self.table.items()})

    def translate(self, g) -> "PrefixFunction":
        s = _form(self.ctx, g)
        if s == self.ctx.identity_form:
            return self
        si = self.ctx.inv_forms(s)
        mul = self.ctx.mul_forms
        return tabulate(self.ctx, self.depth + self.ctx.length(s), lambda w: self(mul(si, w)))

    def _combine(self, other, sign):
        if other.is_zero():
            return self
        D = max(self.depth, other.depth)
        return tabulate(self.ctx, D, lambda w: self(w) + sign * other(w))

    def refine(self, depth: int) -> "PrefixFunction":
        if depth < self.depth:
            raise ValueError("refine only increases depth")
        return tabulate(self.ctx, depth, self)

    def simplify(self) -> "PrefixFunction":
        """Smallest-depth equivalent representation."""
        f = self
        while f.depth > 0:
            d = f.depth
            ok = True
            for u in _words_of_exact_length(f.ctx, d - 1):
                v = f.table.get(u, 0)
                if any(f.table.get(c, 0) != v for c in f.ctx.one_letter_extensions(u)):
                    ok = False
                    break
            if not ok:
                break
            f = PrefixFunction(f.ctx, d - 1, {w: v for w, v in f.table.items() if len(w) < d})
        return f


def _words_of_exact_length(ctx: GroupContext, L: int) -> list[Form]:
    level = [()]
    for _ in range(L):
        level = [w for u in level for w in ctx.one_letter_extensions(u)]
    return level


def tabulate(ctx: GroupContext, depth: int, fn: Callable[[Form], Fraction], budget: int = WORD_BUDGET) -> PrefixFunction:
    """Prefix function of the given depth whose value on each class is fn(representative).

    The caller guarantees fn is constant on every depth-``depth`` cone.
    """
    if depth > DEPTH_CAP:
        raise BudgetError(f"prefix depth {depth} exceeds cap {DEPTH_CAP}", stage="dixmier")
    n = class_count(ctx, depth)
    if n > budget:
        raise BudgetError(f"{n} prefix classes at depth {depth} exceed budget {budget}", stage="dixmier")
    table = {}
    for w in ctx.words_up_to(depth):
        v = fn(w)
        if v:
            table[w] = _frac(v)
    return PrefixFunction(ctx, depth, table)


def coerce_pair(f: BoundedFunction, g: BoundedFunction):
    if f.ctx != g.ctx:
        raise ContextMismatchError("functions live on different groups")
    if type(f) is type(g):
        return f, g
    if isinstance(f, FinsuppFunction):
        return f.to_prefix(), g
    return f, g.to_prefix()


def coerce_all(fs: Sequence[BoundedFunction]) -> list[BoundedFunction]:
    if not fs:
        return []
    ctx = fs[0].ctx
    if any(f.ctx != ctx for f in fs):
        raise ContextMismatchError("functions live on different groups")
    if any(isinstance(f, PrefixFunction) for f in fs):
        return [f.to_prefix() if isinstance(f, FinsuppFunction) else f for f in fs]
    return list(fs)


def translate(ctx: GroupContext, g, f: BoundedFunction) -> BoundedFunction:
    """Left translate: (g.f)(x) = f(g^-1 x)."""
    if f.ctx != ctx:
        raise ContextMismatchError("function lives on a different group")
    return f.translate(g)


def sup_exact(f: BoundedFunction) -> Fraction:
    return f.sup()


def build_H(pairs: Sequence[tuple[BoundedFunction, object]], ctx: GroupContext | None = None) -> BoundedFunction:
    """H = sum_i h_i - g_i.h_i, exactly."""
    if not pairs:
        if ctx is None:
            raise ValueError("empty pair list needs an explicit context")
        return FinsuppFunction.zero(ctx)
    hs = coerce_all([h for h, _ in pairs])
    ctx = hs[0].ctx
    gs = [_form(ctx, g) for _, g in pairs]
    if isinstance(hs[0], FinsuppFunction):
        acc: dict = {}
        for h, g in zip(hs, gs):
            left = ctx.left_multiplier(g)
            for x, v in h.values.items():
                acc[x] = acc.get(x, 0) + v
                y = left(x)
                acc[y] = acc.get(y, 0) - v
        return FinsuppFunction(ctx, {x: v for x, v in acc.items() if v})
    D = max(h.depth + ctx.length(g) for h, g in zip(hs, gs))
    mul = ctx.mul_forms
    terms = [(h, ctx.inv_forms(g)) for h, g in zip(hs, gs) if g != ctx.identity_form]
    return tabulate(ctx, D, lambda w: sum((h(w) - h(mul(gi, w)) for h, gi in terms), Fraction(0)))


def average_convolve(F, f: BoundedFunction) -> BoundedFunction:
    """(1/|F|) sum_{g in F} g.f for a non-empty finite set F."""
    ctx = f.ctx
    if isinstance(F, FolnerCandidate):
        F = F.elements
    forms = sorted({_form(ctx, g) for g in F})
    if not forms:
        raise ValueError("F must be non-empty")
    n = len(forms)
    if isinstance(f, FinsuppFunction):
        acc: dict = {}
        for g in forms:
            left = ctx.left_multiplier(g)
            for x, v in f.values.items():
                y = left(x)
                acc[y] = acc.get(y, 0) + v
        return FinsuppFunction(ctx, {x: v / n for x, v in acc.items() if v})
    D = f.depth + max(ctx.length(g) for g in forms)
    inverses = [ctx.inv_forms(g) for g in forms]
    mul = ctx.mul_forms
    return tabulate(ctx, D, lambda w: sum((f(mul(gi, w)) for gi in inverses), Fraction(0)) / n)


# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class DixmierWitness:
    """Pairs (h_i, g_i) with H = sum h_i - g_i.h_i."""

    ctx: GroupContext
    pairs: tuple[tuple[BoundedFunction, GroupElement], ...]

    @classmethod
    def from_pairs(cls, ctx: GroupContext, pairs) -> "DixmierWitness":
        return cls(ctx, tuple((h, ctx.element(g)) for h, g in pairs))

    @cached_property
    def S(self) -> GeneratorMultiset:
        return GeneratorMultiset.from_forms(self.ctx, [g.form for _, g in self.pairs])

    @cached_property
    def normalization(self) -> Fraction:
        """2 |S| max_i ||h_i||."""
        if not self.pairs:
            return Fraction(0)
        return 2 * len(self.pairs) * max(h.norm() for h, _ in self.pairs)

    @cached_property
    def H(self) -> BoundedFunction:
        return build_H(self.pairs, self.ctx)

    @cached_property
    def sup(self) -> Fraction:
        return self.H.sup()

    @property
    def epsilon(self) -> Fraction:
        """-sup(H) when negative, else 0."""
        return max(-self.sup, Fraction(0))

    @property
    def is_normalized(self) -> bool:
        return self.normalization == 1

    def normalize(self) -> "DixmierWitness":
        c = self.normalization
        if not c:
            raise ValueError("a witness with zero normalization cannot be rescaled")
        return DixmierWitness(self.ctx, tuple((h.scale(1 / c), g) for h, g in self.pairs))


@dataclass(frozen=True)
class ParadoxicalDecomposition:
    ctx: GroupContext
    A: tuple[BoundedFunction, ...]
    B: tuple[BoundedFunction, ...]
    C: BoundedFunction
    gammas: tuple[GroupElement, ...]
    etas: tuple[GroupElement, ...]

    def __post_init__(self):
        if len(self.A) != len(self.gammas) or len(self.B) != len(self.etas):
            raise ValueError("one translator per piece")
        idf = self.ctx.identity_form
        if self.gammas[0].form != idf or self.etas[0].form != idf:
            raise ValueError("the first translator of each family must be the identity")

    @property
    def tarski_count(self) -> int:
        return len(self.A) + len(self.B)

    def check_partitions(self) -> dict[str, bool]:
        one = PrefixFunction.constant(self.ctx, 1)
        pieces = list(self.A) + list(self.B) + [self.C]
        indicators = all(p == _square(p) for p in pieces)
        total = _sum(pieces, self.ctx)
        cover_a = _sum([a.translate(g) for a, g in zip(self.A, self.gammas)], self.ctx)
        cover_b = _sum([b.translate(g) for b, g in zip(self.B, self.etas)], self.ctx)
        return {
            "indicators": indicators,
            "partition": total == one,
            "gamma_cover": cover_a == one,
            "eta_cover": cover_b == one,
        }

    def _pairs(self, scale: Fraction):
        pairs = [(a.scale(scale), g) for a, g in zip(self.A[1:], self.gammas[1:])]
        pairs += [(b.scale(scale), g) for b, g in zip(self.B[1:], self.etas[1:])]
        return pairs

    def scaled_H(self) -> BoundedFunction:
        """Sum of (1_P - g.1_P)/(s+t-2) over non-identity pieces; sup is -1/(s+t-2)."""
        return build_H(self._pairs(Fraction(1, self.tarski_count - 2)), self.ctx)

    def witness(self) -> DixmierWitness:
        """Normalized witness; its epsilon is 1/(2(s+t-2))."""
        return DixmierWitness.from_pairs(self.ctx, self._pairs(Fraction(1, 2 * (self.tarski_count - 2))))


def _square(f: BoundedFunction) -> BoundedFunction:
    if isinstance(f, FinsuppFunction):
        return FinsuppFunction(f.ctx, {x: v * v for x, v in f.values.items()})
    return PrefixFunction(f.ctx, f.depth, {w: v * v for w, v in f.table.items()})


def _sum(fs, ctx):
    acc = FinsuppFunction.zero(ctx)
    for f in fs:
        acc = acc + f
    return acc


def paradoxical_witness_f2() -> tuple[ParadoxicalDecomposition, DixmierWitness]:
    """The four-piece decomposition of F2 by first letter, with C = {e}."""
    ctx = parse_group("free:2")
    cone = lambda w: PrefixFunction.cone_indicator(ctx, w)  # noqa: E731
    A = (cone("a"), cone("a^-1"))
    B = (cone("b"), cone("b^-1"))
    C = FinsuppFunction.indicator(ctx, ["e"]).to_prefix()
    e = ctx.identity()
    dec = ParadoxicalDecomposition(ctx, A, B, C, (e, ctx.element("a")), (e, ctx.element("b")))
    return dec, dec.witness()


# ---------------------------------------------------------------------------
# iteration


@dataclass
class IterationStep:
    witness: DixmierWitness
    k: Fraction
    previous_normalization: Fraction
    norm_H: Fraction
    sup_before: Fraction
    sup_after: Fraction
    sup_monotone: bool
    regrouped: bool
    F_size: int

    @property
    def bound(self) -> Fraction:
        return (1 - self.k) * self.previous_normalization


def _same_multiset(a: GeneratorMultiset, b: GeneratorMultiset) -> bool:
    return a.size == b.size and a.count_map == b.count_map


def dixmier_iterate(witness: DixmierWitness, F: FolnerCandidate, regroup: bool = True) -> IterationStep:
    """One averaging step H -> sum_s (A h_s - s.A h_s), A = average over F.

    With ``regroup`` the new witness cancels the common translates: each g in
    F \\ sF is paired with some g' in sF \\ F, giving the pair
    (g.h_s/|F|, g' g^-1).  It has the same H and normalization at most
    (1-k) times the old one.  Without it the pairs are (A h_s, s).
    """
    ctx = witness.ctx
    if F.multiset.ctx != ctx:
        raise ContextMismatchError("F was evaluated on a different group")
    if not _same_multiset(F.multiset, witness.S):
        raise ValueError("overlap of F was computed for a different multiset than the witness uses")
    Fforms = [g.form for g in F.elements]
    Fset = set(Fforms)
    n = len(Fforms)
    c0 = witness.normalization

    literal = [(average_convolve(Fforms, h), g) for h, g in witness.pairs] if not ctx.is_abelian or not regroup else None
    if regroup:
        new_pairs = []
        mul = ctx.mul_forms
        for h, s in witness.pairs:
            sF = {mul(s.form, x) for x in Fforms}
            out = sorted(Fset - sF)
            inn = sorted(sF - Fset)
            for g, g2 in zip(out, inn):
                gamma = GroupElement(ctx, mul(g2, ctx.inv_forms(g)))
                new_pairs.append((h.translate(g).scale(Fraction(1, n)), gamma))
        new = DixmierWitness(ctx, tuple(new_pairs))
        H1 = new.H
        other = build_H(literal, ctx) if literal is not None else average_convolve(Fforms, witness.H)
        if not (H1 == other):
            raise InvariantViolation("regrouped witness disagrees with the averaged H")
        if new.normalization > (1 - F.overlap) * c0:
            raise InvariantViolation("regrouped normalization exceeds (1-k) times the previous one")
    else:
        new = DixmierWitness(ctx, tuple(literal))
        H1 = new.H
        if ctx.is_abelian and not (H1 == average_convolve(Fforms, witness.H)):
            raise InvariantViolation("pairwise averaging disagrees with averaging H")
    norm = H1.norm()
    k = F.overlap
    if norm > (1 - k) * c0:
        raise InvariantViolation(f"||H1|| = {norm} exceeds (1-k) * {c0}")
    s0, s1 = witness.sup, H1.sup()
    monotone = s1 <= s0
    if ctx.is_abelian and not monotone:
        raise InvariantViolation("averaging raised the supremum on an abelian group")
    return IterationStep(new, k, c0, norm, s0, s1, monotone, regroup, n)


def adapted_box(ctx: GroupContext, S: GeneratorMultiset, side: int) -> FolnerCandidate:
    """Cube of the given side in Z^d, dilated by the gcd of the coordinates of S."""
    if ctx.family != "zd":
        raise CoercionError("boxes are defined on Z^d only")
    g = 0
    for f, _ in S.counts:
        for x in f:
            g = math.gcd(g, abs(x))
    g = g or 1
    d = ctx.rank
    pts = [()]
    for _ in range(d):
        pts = [p + (g * i,) for p in pts for i in range(side)]
    return phi(ctx, S, pts)


@dataclass
class ChainReport:
    start: DixmierWitness
    steps: list[IterationStep]
    chain_bounds: list[Fraction]  # prod (1-k_i) times the starting normalization
    norms: list[Fraction]

    @property
    def final(self) -> DixmierWitness:
        return self.steps[-1].witness if self.steps else self.start


def dixmier_chain(
    witness: DixmierWitness,
    m: int,
    choose_F: Callable[[DixmierWitness], FolnerCandidate],
    regroup: bool = True,
) -> ChainReport:
    """m regrouped iterations; asserts ||H_j|| <= prod_{i<=j} (1-k_i) * c_0."""
    steps, bounds, norms = [], [], []
    c = witness.normalization
    w = witness
    for _ in range(m):
        st = dixmier_iterate(w, choose_F(w), regroup=regroup)
        c = c * (1 - st.k)
        if regroup and st.norm_H > c:
            raise InvariantViolation(f"chain norm {st.norm_H} exceeds bound {c}")
        steps.append(st)
        bounds.append(c)
        norms.append(st.norm_H)
        w = st.witness
    return ChainReport(witness, steps, bounds, norms)


def dichotomy_check(epsilon: Fraction, chain_bound: Fraction) -> None:
    """A normalized witness with sup(H) <= -epsilon forces epsilon <= chain bound.

    Raises InvariantViolation when the claimed epsilon is incompatible.
    """
    if epsilon > chain_bound:
        raise InvariantViolation(
            f"epsilon {epsilon} exceeds averaging bound {chain_bound}; the witness cannot exist"
        )


# ---------------------------------------------------------------------------
# serialization


def _fr(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def function_to_json(f: BoundedFunction) -> dict:
    ctx = f.ctx
    if isinstance(f, PrefixFunction):
        items = sorted(f.table.items(), key=lambda kv: (len(kv[0]), kv[0]))
        return {
            "kind": "prefix",
            "depth": f.depth,
            "values": [[ctx.format_form(w), _fr(v)] for w, v in items],
        }
    return {
        "kind": "finsupp",
        "values": [[ctx.format_form(x), _fr(v)] for x, v in sorted(f.values.items())],
    }


def function_from_json(ctx: GroupContext, d: dict) -> BoundedFunction:
    vals = [(parse_word(ctx, w), Fraction(v)) for w, v in d["values"]]
    if d["kind"] == "prefix":
        return PrefixFunction.build(ctx, d["depth"], vals)
    if d["kind"] == "finsupp":
        return FinsuppFunction.build(ctx, vals)
    raise ValueError(f"unknown function kind {d['kind']!r}")


def witness_to_json(w: DixmierWitness) -> dict:
    return {
        "group": w.ctx.spec(),
        "pairs": [{"gamma": str(g), "h": function_to_json(h)} for h, g in w.pairs],
        "normalization": _fr(w.normalization),
        "sup": _fr(w.sup),
        "epsilon": _fr(w.epsilon),
    }


def witness_from_json(d: dict) -> DixmierWitness:
    ctx = parse_group(d["group"])
    w = DixmierWitness.from_pairs(
        ctx, [(function_from_json(ctx, p["h"]), parse_word(ctx, p["gamma"])) for p in d["pairs"]]
    )
    if _fr(w.sup) != d.get("sup", _fr(w.sup)):
        raise ValueError("stored sup does not match the reconstructed witness")
    return w


def dumps_witness(w: DixmierWitness) -> str:
    return json.dumps(witness_to_json(w), indent=2, sort_keys=True)
