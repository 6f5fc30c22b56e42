"""Exact arithmetic for the supported group families and generator multisets.

Three families are supported, all with canonical normal forms so that element
equality is tuple equality:

* ``free:k``   free group on k letters; a form is a reduced tuple of signed
  letter indices (``+i`` for the i-th generator, ``-i`` for its inverse).
* ``zd:d``     the lattice Z^d; a form is an integer coordinate tuple.
* ``fpc:n1,..`` free product of cyclic groups of orders n1, n2, ...; a form is
  a tuple of syllables ``(factor, exponent)`` with ``0 < exponent < n_factor``
  and no two adjacent syllables from the same factor.

Generators are named ``a, b, c, d, f, g, ...``; ``e`` is reserved for the
identity.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator

from .errors import BudgetError, ContextMismatchError, SpecParseError

LETTERS = "abcdfghijklmnopqrstuvwxyz"
FAMILIES = ("free", "zd", "fpc")

Form = tuple


@dataclass(frozen=True)
class GroupContext:
    family: str
    params: tuple[int, ...]

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise SpecParseError(f"unknown group family {self.family!r}")
        if not self.params or any(p < 1 for p in self.params):
            raise SpecParseError(f"bad parameters {self.params} for {self.family}")
        if self.family in ("free", "zd") and len(self.params) != 1:
            raise SpecParseError(f"{self.family} takes exactly one parameter")
        if self.family == "fpc" and any(n < 2 for n in self.params):
            raise SpecParseError("cyclic factor orders must be >= 2")
        if self.rank > len(LETTERS):
            raise SpecParseError(f"at most {len(LETTERS)} generators supported")

    # -- descriptive -------------------------------------------------------

    @property
    def rank(self) -> int:
        """Number of named generators."""
        return self.params[0] if self.family in ("free", "zd") else len(self.params)

    @property
    def is_abelian(self) -> bool:
        if self.family == "zd":
            return True
        if self.family == "free":
            return self.rank == 1
        return len(self.params) == 1

    @property
    def order(self) -> int | None:
        """Group order, or None for infinite groups."""
        if self.family == "fpc" and len(self.params) == 1:
            return self.params[0]
        return None

    @property
    def has_prefix_structure(self) -> bool:
        """True for families whose normal forms are words (free, fpc)."""
        return self.family != "zd"

    def spec(self) -> str:
        return f"{self.family}:{','.join(map(str, self.params))}"

    def __str__(self):
        return self.spec()

    # -- arithmetic on raw normal forms -------------------------------------

    @cached_property
    def identity_form(self) -> Form:
        return (0,) * self.rank if self.family == "zd" else ()

    def mul_forms(self, u: Form, v: Form) -> Form:
        fam = self.family
        if fam == "zd":
            return tuple(x + y for x, y in zip(u, v))
        if fam == "free":
            i, n, lu = 0, min(len(u), len(v)), len(u)
            while i < n and u[lu - 1 - i] == -v[i]:
                i += 1
            return u[: lu - i] + v[i:]
        res = list(u)
        for f, e in v:
            if res and res[-1][0] == f:
                ne = (res[-1][1] + e) % self.params[f]
                if ne:
                    res[-1] = (f, ne)
                else:
                    res.pop()
            else:
                res.append((f, e))
        return tuple(res)

    def left_multiplier(self, s: Form):
        """Fast ``x -> s*x`` for a fixed s (single free letters avoid the general loop)."""
        if self.family == "free" and len(s) == 1:
            a, ai = s[0], -s[0]

            def left(x):
                return x[1:] if x and x[0] == ai else s + x

            return left
        mul = self.mul_forms
        return lambda x: mul(s, x)

    def inv_forms(self, u: Form) -> Form:
        fam = self.family
        if fam == "zd":
            return tuple(-x for x in u)
        if fam == "free":
            return tuple(-x for x in reversed(u))
        return tuple((f, (-e) % self.params[f]) for f, e in reversed(u))

    def length(self, u: Form) -> int:
        """Word length in the standard generators (L1 norm on Z^d, syllables on fpc)."""
        if self.family == "zd":
            return sum(abs(x) for x in u)
        return len(u)

    def letter_forms(self) -> list[Form]:
        """Forms of the positive generators, in name order."""
        if self.family == "zd":
            d = self.rank
            return [tuple(1 if j == i else 0 for j in range(d)) for i in range(d)]
        if self.family == "free":
            return [(i,) for i in range(1, self.rank + 1)]
        return [((f, 1),) for f in range(self.rank)]

    def letters_of(self, u: Form) -> list[Form]:
        """Split a form into single-letter forms whose left-to-right product is u."""
        if self.family == "free":
            return [(x,) for x in u]
        if self.family == "fpc":
            return [(syl,) for syl in u]
        out = []
        for i, x in enumerate(u):
            step = tuple((1 if x > 0 else -1) if j == i else 0 for j in range(len(u)))
            out.extend([step] * abs(x))
        return out

    # -- word enumeration (free families only) ------------------------------

    def one_letter_extensions(self, u: Form) -> Iterator[Form]:
        """Reduced words of length len(u)+1 having u as a prefix."""
        if self.family == "free":
            last = u[-1] if u else 0
            for i in range(1, self.rank + 1):
                for x in (i, -i):
                    if x != -last:
                        yield u + (x,)
        elif self.family == "fpc":
            last = u[-1][0] if u else -1
            for f, n in enumerate(self.params):
                if f != last:
                    for e in range(1, n):
                        yield u + ((f, e),)
        else:
            raise ContextMismatchError("prefix words exist only for free families")

    def words_up_to(self, depth: int) -> list[Form]:
        """All reduced words of length <= depth, shortlex order."""
        level = [()]
        out = [()]
        for _ in range(depth):
            level = [w for u in level for w in self.one_letter_extensions(u)]
            out.extend(level)
        return out

    # -- elements and parsing ----------------------------------------------

    def element(self, x) -> "GroupElement":
        """Coerce a form, element or word string to an element of this context."""
        if isinstance(x, GroupElement):
            if x.ctx != self:
                raise ContextMismatchError(f"element of {x.ctx} used in {self}")
            return x
        if isinstance(x, str):
            return GroupElement(self, parse_word(self, x))
        form = tuple(x)
        self._check_form(form)
        return GroupElement(self, form)

    def identity(self) -> "GroupElement":
        return GroupElement(self, self.identity_form)

    def generators(self) -> list["GroupElement"]:
        return [GroupElement(self, f) for f in self.letter_forms()]

    def standard_symmetric(self) -> "GeneratorMultiset":
        """Generators followed by their inverses; order-2 letters appear once."""
        entries = []
        for g in self.letter_forms():
            entries.append(g)
            gi = self.inv_forms(g)
            if gi != g:
                entries.append(gi)
        return GeneratorMultiset.from_forms(self, entries)

    def _check_form(self, form: Form):
        ok = True
        if self.family == "zd":
            ok = len(form) == self.rank and all(isinstance(x, int) for x in form)
        elif self.family == "free":
            ok = all(isinstance(x, int) and 0 < abs(x) <= self.rank for x in form)
            ok = ok and all(form[i] != -form[i + 1] for i in range(len(form) - 1))
        else:
            for i, syl in enumerate(form):
                f, e = syl
                if not (0 <= f < self.rank and 0 < e < self.params[f]):
                    ok = False
                if i and form[i - 1][0] == f:
                    ok = False
        if not ok:
            raise SpecParseError(f"{form!r} is not a normal form in {self}")

    def format_form(self, u: Form) -> str:
        if self.family == "zd":
            return "(" + ",".join(map(str, u)) + ")"
        if not u:
            return "e"
        if self.family == "fpc":
            return "".join(
                LETTERS[f] + (f"^{e}" if e != 1 else "") for f, e in u
            )
        out = []
        i = 0
        while i < len(u):
            j = i
            while j < len(u) and u[j] == u[i]:
                j += 1
            p = (j - i) * (1 if u[i] > 0 else -1)
            out.append(LETTERS[abs(u[i]) - 1] + (f"^{p}" if p != 1 else ""))
            i = j
        return "".join(out)


@dataclass(frozen=True, slots=True)
class GroupElement:
    ctx: GroupContext
    form: Form

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return mul(self.ctx, self, other)

    def inverse(self) -> "GroupElement":
        return inv(self.ctx, self)

    def __len__(self):
        return self.ctx.length(self.form)

    def __lt__(self, other: "GroupElement") -> bool:
        return self.form < other.form

    def __str__(self):
        return self.ctx.format_form(self.form)

    def __repr__(self):
        return f"<{self.ctx.spec()} {self}>"


def _same_ctx(ctx: GroupContext, *elements: GroupElement):
    for g in elements:
        if g.ctx != ctx:
            raise ContextMismatchError(f"element {g} belongs to {g.ctx}, not {ctx}")


def mul(ctx: GroupContext, g: GroupElement, h: GroupElement) -> GroupElement:
    _same_ctx(ctx, g, h)
    return GroupElement(ctx, ctx.mul_forms(g.form, h.form))


def inv(ctx: GroupContext, g: GroupElement) -> GroupElement:
    _same_ctx(ctx, g)
    return GroupElement(ctx, ctx.inv_forms(g.form))


# ---------------------------------------------------------------------------
# multisets


@dataclass(frozen=True)
class GeneratorMultiset:
    """A finite multiset of group elements.

    ``counts`` lists (form, multiplicity) in first-appearance order and
    ``size`` is the nominal |S|.  Explicit multisets also keep ``entries``;
    collapsed ones (multiset powers) have ``entries = None`` and a size that
    can be far larger than the support.
    """

    ctx: GroupContext
    counts: tuple[tuple[Form, int], ...]
    size: int
    entries: tuple[Form, ...] | None = None

    @classmethod
    def from_forms(cls, ctx: GroupContext, forms: Iterable[Form]) -> "GeneratorMultiset":
        forms = tuple(tuple(f) for f in forms)
        for f in forms:
            ctx._check_form(f)
        c = Counter(forms)
        counts = tuple((f, c[f]) for f in dict.fromkeys(forms))
        return cls(ctx, counts, len(forms), forms)

    @classmethod
    def from_elements(cls, ctx: GroupContext, elements: Iterable) -> "GeneratorMultiset":
        return cls.from_forms(ctx, [ctx.element(g).form for g in elements])

    @classmethod
    def collapsed(cls, ctx: GroupContext, counts: dict, size: int) -> "GeneratorMultiset":
        items = tuple((f, c) for f, c in counts.items() if c)
        if sum(c for _, c in items) != size:
            raise ValueError("multiplicities must sum to the declared size")
        return cls(ctx, items, size, None)

    def __len__(self):
        return self.size

    @property
    def is_collapsed(self) -> bool:
        return self.entries is None

    @property
    def elements(self) -> list[GroupElement]:
        if self.entries is None:
            raise ValueError("collapsed multiset has no explicit entry list")
        return [GroupElement(self.ctx, f) for f in self.entries]

    @property
    def support(self) -> list[GroupElement]:
        return [GroupElement(self.ctx, f) for f, _ in self.counts]

    @cached_property
    def count_map(self) -> dict:
        return dict(self.counts)

    def multiplicity(self, g) -> int:
        return self.count_map.get(self.ctx.element(g).form, 0)

    def weights(self) -> dict[GroupElement, Fraction]:
        return {GroupElement(self.ctx, f): Fraction(c, self.size) for f, c in self.counts}

    @cached_property
    def is_symmetric(self) -> bool:
        cm = self.count_map
        return all(cm.get(self.ctx.inv_forms(f), 0) == c for f, c in self.counts)

    @cached_property
    def max_length(self) -> int:
        return max((self.ctx.length(f) for f, _ in self.counts), default=0)

    def spec(self) -> str:
        if self.entries is None:
            return "{" + ", ".join(
                f"{self.ctx.format_form(f)}:{c}" for f, c in self.counts
            ) + f"}}/{self.size}"
        return "[" + ", ".join(self.ctx.format_form(f) for f in self.entries) + "]"

    def __str__(self):
        return self.spec()


def symmetrize(S: GeneratorMultiset) -> GeneratorMultiset:
    """S followed by the elementwise inverses of S (size doubles)."""
    ctx = S.ctx
    if S.entries is not None:
        return GeneratorMultiset.from_forms(
            ctx, S.entries + tuple(ctx.inv_forms(f) for f in S.entries)
        )
    merged = dict(S.counts)
    for f, c in S.counts:
        fi = ctx.inv_forms(f)
        merged[fi] = merged.get(fi, 0) + c
    return GeneratorMultiset.collapsed(ctx, merged, 2 * S.size)


def multiset_power(
    ctx: GroupContext, S: GeneratorMultiset, n: int, max_support: int = 2_000_000
) -> GeneratorMultiset:
    """Collapsed product multiset S^n (support with tuple counts, size |S|^n)."""
    if S.ctx != ctx:
        raise ContextMismatchError("multiset belongs to a different context")
    if n < 1:
        raise ValueError("power must be >= 1")
    base = S.counts
    acc = dict(base)
    for _ in range(n - 1):
        if len(acc) * len(base) > 50 * max_support:
            raise BudgetError(
                f"multiset power work {len(acc)}x{len(base)} exceeds budget",
                stage="multiset_power",
            )
        nxt: dict = {}
        for g, cg in acc.items():
            for s, cs in base:
                x = ctx.mul_forms(g, s)
                nxt[x] = nxt.get(x, 0) + cg * cs
        if len(nxt) > max_support:
            raise BudgetError(
                f"support of S^n exceeds {max_support} elements", stage="multiset_power"
            )
        acc = nxt
    return GeneratorMultiset.collapsed(ctx, acc, S.size**n)


# ---------------------------------------------------------------------------
# mini-grammar

_GROUP_RE = re.compile(r"^\s*(free|zd|fpc)\s*:\s*([0-9,\s]+)$")
_TOKEN_RE = re.compile(r"\s*(?:(\([-0-9,\s]*\))|([a-z1])(?:\^(-?\d+))?)")


def parse_group(spec: str) -> GroupContext:
    """Parse ``free:k``, ``zd:d`` or ``fpc:n1,n2,...``."""
    m = _GROUP_RE.match(spec)
    if not m:
        raise SpecParseError(f"cannot parse group spec {spec!r}")
    try:
        params = tuple(int(x) for x in m.group(2).split(",") if x.strip())
    except ValueError as exc:
        raise SpecParseError(str(exc)) from None
    return GroupContext(m.group(1), params)


def _letter_power(ctx: GroupContext, letter: str, power: int) -> Form:
    if letter in ("e", "1"):
        return ctx.identity_form
    idx = LETTERS.find(letter)
    if idx < 0 or idx >= ctx.rank:
        raise SpecParseError(f"letter {letter!r} is not a generator of {ctx}")
    g = ctx.letter_forms()[idx]
    base = g if power >= 0 else ctx.inv_forms(g)
    out = ctx.identity_form
    for _ in range(abs(power)):
        out = ctx.mul_forms(out, base)
    return out


def parse_word(ctx: GroupContext, text: str) -> Form:
    """Parse a product of tokens such as ``ab^-1a`` or ``(1,-2)`` into a normal form."""
    text = text.strip()
    if not text:
        raise SpecParseError("empty word")
    pos = 0
    out = ctx.identity_form
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise SpecParseError(f"cannot parse word {text!r} at position {pos}")
        pos = m.end()
        if m.group(1):
            if ctx.family != "zd":
                raise SpecParseError("vector literals only apply to zd groups")
            try:
                vec = tuple(int(x) for x in m.group(1)[1:-1].split(","))
            except ValueError:
                raise SpecParseError(f"bad vector {m.group(1)!r}") from None
            if len(vec) != ctx.rank:
                raise SpecParseError(f"vector {vec} has wrong dimension for {ctx}")
            tok = vec
        else:
            tok = _letter_power(ctx, m.group(2), int(m.group(3) or 1))
        out = ctx.mul_forms(out, tok)
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


def parse_multiset(ctx: GroupContext, text: str, max_support: int = 2_000_000) -> GeneratorMultiset:
    """Parse ``[w1, w2, ...]`` or ``std``, optionally followed by ``^n``."""
    text = text.strip()
    m = re.match(r"^(.*?)(?:\^(\d+))?$", text, re.S)
    body, power = m.group(1).strip(), m.group(2)
    if body == "std":
        S = ctx.standard_symmetric()
    elif body.startswith("[") and body.endswith("]"):
        inner = body[1:-1].strip()
        if not inner:
            raise SpecParseError("empty multiset")
        S = GeneratorMultiset.from_forms(
            ctx, [parse_word(ctx, w) for w in _split_top_level(inner)]
        )
    else:
        raise SpecParseError(f"cannot parse multiset {text!r}")
    if power is not None:
        n = int(power)
        if n < 1:
            raise SpecParseError("multiset power must be >= 1")
        if n > 1:
            S = multiset_power(ctx, S, n, max_support=max_support)
    return S


def _split_top_level(s: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts
