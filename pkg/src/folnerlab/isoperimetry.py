"""Isoperimetric functional, conductance bounds and the p_c < p_u criterion.

For a finite F and multiset S,

    phi(F)     = sum_s mult(s) |sF \\ F| / (|S| |F|)
    overlap(F) = sum_s mult(s) |sF & F| / (|S| |F|) = 1 - phi(F)

and the conductance h(Gamma, S) is the infimum of phi over finite F.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .cayley import CayleyBall
from .errors import BudgetError, ContextMismatchError
from .groups import Form, GeneratorMultiset, GroupContext, GroupElement
from .provenance import Provenance

SQRT_HALF = math.sqrt(0.5)
DEFAULT_EXHAUSTIVE_CAP = 9


@dataclass(frozen=True)
class FolnerCandidate:
    """A finite set F with its exact boundary data relative to a multiset."""

    elements: tuple[GroupElement, ...]
    multiset: GeneratorMultiset
    boundary_counts: tuple[int, ...]  # |sF \ F| per support element of the multiset
    phi: Fraction
    overlap: Fraction

    @property
    def size(self) -> int:
        return len(self.elements)

    def forms(self) -> frozenset:
        return frozenset(g.form for g in self.elements)


def _as_forms(ctx: GroupContext, F: Iterable) -> list[Form]:
    out = []
    for x in F:
        if isinstance(x, GroupElement):
            if x.ctx != ctx:
                raise ContextMismatchError(f"{x!r} is not in {ctx}")
            out.append(x.form)
        else:
            out.append(ctx.element(x).form)
    return out


def boundary_and_overlap(ctx: GroupContext, s: Form, Fset: set) -> tuple[int, int]:
    """(|sF \\ F|, |sF & F|); the two always sum to |F|."""
    mul = ctx.mul_forms
    inside = sum(1 for x in Fset if mul(s, x) in Fset)
    return len(Fset) - inside, inside


def phi(ctx: GroupContext, S: GeneratorMultiset, F: Iterable) -> FolnerCandidate:
    """Exact isoperimetric ratio and overlap of a non-empty finite set F."""
    if S.ctx != ctx:
        raise ContextMismatchError("multiset belongs to a different context")
    forms = sorted(set(_as_forms(ctx, F)))
    if not forms:
        raise ValueError("F must be non-empty")
    Fset = set(forms)
    counts = []
    out_total = in_total = 0
    for s, c in S.counts:
        b, i = boundary_and_overlap(ctx, s, Fset)
        counts.append(b)
        out_total += c * b
        in_total += c * i
    denom = S.size * len(Fset)
    return FolnerCandidate(
        elements=tuple(GroupElement(ctx, f) for f in forms),
        multiset=S,
        boundary_counts=tuple(counts),
        phi=Fraction(out_total, denom),
        overlap=Fraction(in_total, denom),
    )


# ---------------------------------------------------------------------------
# search


@dataclass
class SearchResult:
    best: FolnerCandidate
    per_size: dict[int, Fraction]
    explored: int
    mode: str
    params: dict = field(default_factory=dict)


def _directed_slots(ball: CayleyBall, S: GeneratorMultiset | None) -> tuple[GeneratorMultiset, np.ndarray]:
    full = ball.multiset
    S = full if S is None else S
    if S.entries is None or tuple(full.entries[: S.size]) != tuple(S.entries):
        raise ValueError("S must be the ball's multiset or the part it was symmetrized from")
    return S, ball.targets[:, : S.size]


def _neighbours(ball: CayleyBall) -> list[list[int]]:
    out = []
    for v, row in enumerate(ball.targets.tolist()):
        out.append(sorted({t for t in row if t >= 0 and t != v}))
    return out


def folner_search(
    ball: CayleyBall,
    S: GeneratorMultiset | None = None,
    mode: str = "exhaustive",
    max_size: int = 8,
    connected: bool = True,
    cap: int = DEFAULT_EXHAUSTIVE_CAP,
    budget: int = 100_000,
    seed: int = 0,
    chains: int = 1,
) -> SearchResult:
    """Search the ball interior for a set minimizing phi.

    ``exhaustive`` enumerates every connected set of size <= max_size that
    contains the center.  phi is invariant under right translation F -> Fg,
    which is an automorphism of the Cayley graph, so rooting at the center
    loses nothing.  ``connected=False`` instead enumerates all subsets of the
    interior containing the center (small sizes only).

    ``anneal`` runs ``chains`` seeded Metropolis chains of ``budget`` steps.
    The best phi found is an upper bound on h.
    """
    S, slots = _directed_slots(ball, S)
    if mode == "exhaustive":
        if max_size > cap:
            raise BudgetError(f"exhaustive size {max_size} exceeds cap {cap}", stage="folner_search")
        if max_size < 1 or max_size > ball.radius:
            raise IndexError(
                f"sets of size {max_size} around the center need ball radius >= {max_size}"
            )
        best, per_size, explored = _exhaustive(ball, slots, max_size, connected)
        params = {"max_size": max_size, "connected": connected}
    elif mode == "anneal":
        if ball.radius < 1:
            raise IndexError("annealing needs a ball with non-empty interior")
        best, per_size, explored = None, {}, 0
        for c in range(chains):
            cand, sizes, steps = _anneal(ball, slots, budget, seed + c)
            explored += steps
            for n, b in sizes.items():
                if n not in per_size or b < per_size[n]:
                    per_size[n] = b
            if best is None or (Fraction(cand[0], S.size * len(cand[1])), len(cand[1])) < (
                Fraction(best[0], S.size * len(best[1])),
                len(best[1]),
            ):
                best = cand
        params = {"budget": budget, "seed": seed, "chains": chains}
    else:
        raise ValueError(f"unknown mode {mode!r}")
    cand = phi(ball.ctx, S, [ball.points[i] for i in best[1]])
    if cand.phi * S.size * cand.size != best[0]:
        raise AssertionError("incremental boundary count disagrees with direct evaluation")
    per_size_phi = {n: Fraction(b, S.size * n) for n, b in sorted(per_size.items())}
    return SearchResult(cand, per_size_phi, explored, mode, params)


def _exhaustive(ball, slots, max_size, connected):
    m = slots.shape[1]
    tgt = slots.tolist()
    root = ball.center
    into = [0] * ball.n_vertices
    per_size: dict[int, int] = {}
    best_sets: dict[int, tuple] = {}
    explored = 0
    members: list[int] = []
    inF = set()

    def add(v, B):
        nb = B - into[v]
        for t in tgt[v]:
            if t != v and t not in inF:
                nb += 1
            if t >= 0:
                into[t] += 1
        inF.add(v)
        members.append(v)
        return nb

    def remove(v):
        inF.discard(v)
        members.pop()
        for t in tgt[v]:
            if t >= 0:
                into[t] -= 1

    def record(B):
        nonlocal explored
        explored += 1
        n = len(members)
        if n not in per_size or B < per_size[n]:
            per_size[n] = B
            best_sets[n] = tuple(sorted(members))

    if connected:
        nbrs = _neighbours(ball)

        def rec(untried, B, seen):
            untried = list(untried)
            while untried:
                v = untried.pop()
                nb = add(v, B)
                record(nb)
                if len(members) < max_size:
                    new = [w for w in nbrs[v] if w not in seen]
                    seen.update(new)
                    rec(untried + new, nb, seen)
                    seen.difference_update(new)
                remove(v)

        rec([root], 0, {root})
    else:
        pool = [v for v in ball.interior.tolist() if v != root]
        for n in range(1, max_size + 1):
            for rest in itertools.combinations(pool, n - 1):
                B = 0
                for v in (root,) + rest:
                    B = add(v, B)
                record(B)
                for v in reversed((root,) + rest):
                    remove(v)
    best_n = min(per_size, key=lambda n: (Fraction(per_size[n], n), n))
    return (per_size[best_n], best_sets[best_n]), per_size, explored


class _IndexedSet:
    """Set with O(1) add, discard and uniform random choice."""

    def __init__(self):
        self.items: list[int] = []
        self.pos: dict[int, int] = {}

    def add(self, x):
        if x not in self.pos:
            self.pos[x] = len(self.items)
            self.items.append(x)

    def discard(self, x):
        i = self.pos.pop(x, None)
        if i is None:
            return
        last = self.items.pop()
        if i < len(self.items):
            self.items[i] = last
            self.pos[last] = i

    def __len__(self):
        return len(self.items)

    def __contains__(self, x):
        return x in self.pos

    def choice(self, rng):
        return self.items[rng.randrange(len(self.items))]


def _anneal(ball, slots, budget, seed, t0=0.5, factor=0.995):
    """Metropolis add/remove of boundary vertices with geometric cooling.

    Vertices are restricted to the interior so every phi is exact.
    """
    rng = random.Random(seed)
    m = slots.shape[1]
    tgt = slots.tolist()
    nbrs = _neighbours(ball)
    allowed = ball.dist < ball.radius
    n_total = ball.n_vertices
    into = [0] * n_total  # directed slots from F landing on each vertex
    adj_count = [0] * n_total  # undirected neighbours in F
    F = _IndexedSet()
    outer = _IndexedSet()  # allowed vertices adjacent to F, not in F
    inner = _IndexedSet()  # vertices of F with a neighbour outside F

    def out_slots(v):
        return sum(1 for t in tgt[v] if t != v and t not in F)

    def delta_add(v):
        return out_slots(v) - into[v]

    def delta_remove(v):
        # slots of v leaving F are lost; slots of F into v become boundary
        self_loops = sum(1 for t in tgt[v] if t == v)
        return into[v] - self_loops - out_slots(v)

    def refresh(v):
        for w in [v] + nbrs[v]:
            if w in F:
                outer.discard(w)
                if any(x not in F for x in nbrs[w]):
                    inner.add(w)
                else:
                    inner.discard(w)
            else:
                inner.discard(w)
                if allowed[w] and adj_count[w] > 0:
                    outer.add(w)
                else:
                    outer.discard(w)

    def do_add(v):
        F.add(v)
        for t in tgt[v]:
            if t >= 0:
                into[t] += 1
        for w in nbrs[v]:
            adj_count[w] += 1
        refresh(v)

    def do_remove(v):
        F.discard(v)
        for t in tgt[v]:
            if t >= 0:
                into[t] -= 1
        for w in nbrs[v]:
            adj_count[w] -= 1
        refresh(v)

    start = ball.center
    do_add(start)
    B = out_slots(start)
    best = (B, tuple(F.items))
    sizes = {1: B}
    T = t0
    for step in range(budget):
        grow = len(F) == 1 or (len(outer) and rng.random() < 0.5)
        if grow and len(outer):
            v = outer.choice(rng)
            dB = delta_add(v)
            new_n = len(F) + 1
        elif len(F) > 1 and len(inner):
            v = inner.choice(rng)
            dB = delta_remove(v)
            new_n = len(F) - 1
        else:
            T *= factor
            continue
        cur = B / (m * len(F))
        new = (B + dB) / (m * new_n)
        d = new - cur
        if d <= 0 or (T > 0 and rng.random() < math.exp(-d / T)):
            if new_n > len(F):
                do_add(v)
            else:
                do_remove(v)
            B += dB
            n = len(F)
            if n not in sizes or B < sizes[n]:
                sizes[n] = B
            if (Fraction(B, n), n) < (Fraction(best[0], len(best[1])), len(best[1])):
                best = (B, tuple(sorted(F.items)))
        T *= factor
    return best, sizes, budget


# ---------------------------------------------------------------------------
# bounds and the criterion


@dataclass
class HBounds:
    """Bounds on h(Gamma, S) with the source of each side."""

    lower: float | None = None
    lower_source: str = "none"
    upper: float | None = None
    upper_source: str | None = None
    size: int | None = None
    witness: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lower is not None and self.upper is not None and self.lower > self.upper + 1e-12:
            raise AssertionError(f"h lower bound {self.lower} exceeds upper bound {self.upper}")

    @property
    def lower_provenance(self) -> Provenance:
        return Provenance.NONE if self.lower_source == "none" else Provenance.CERTIFIED

    def with_candidate(self, cand: FolnerCandidate) -> "HBounds":
        """Tighten the upper side with phi of an explicit set."""
        value = float(cand.phi)
        if self.upper is not None and self.upper <= value:
            return self
        return HBounds(
            lower=self.lower,
            lower_source=self.lower_source,
            upper=value,
            upper_source="candidate-set",
            size=self.size,
            witness={**self.witness, "F": [str(g) for g in cand.elements], "phi": str(cand.phi)},
        )


def mohar_bounds(
    rho_lower: float | None = None,
    rho_upper: float | None = None,
    size: int | None = None,
    rho_upper_exact: bool = True,
) -> HBounds:
    """Conductance bounds from the two Mohar inequalities.

    rho <= sqrt(1 - h^2) turns a lower bound on rho into an upper bound on h;
    h >= (1 - rho) |S| / (|S| - 1) turns an exact value or upper bound on rho
    into a lower bound on h (clamped to 1).
    """
    for name, r in (("rho_lower", rho_lower), ("rho_upper", rho_upper)):
        if r is not None and not 0.0 <= r <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1]")
    lower = upper = None
    lower_source, upper_source = "none", None
    witness = {}
    if rho_upper is not None:
        if size is None or size < 2:
            raise ZeroDivisionError("the lower bound on h needs |S| >= 2")
        lower = min(1.0, (1.0 - rho_upper) * size / (size - 1))
        lower_source = "mohar-from-exact-rho" if rho_upper_exact else "mohar-from-rho-upper"
        witness["rho_upper"] = rho_upper
    if rho_lower is not None:
        upper = math.sqrt(max(0.0, 1.0 - rho_lower * rho_lower))
        upper_source = "mohar-from-rho-lower"
        witness["rho_lower"] = rho_lower
    return HBounds(lower, lower_source, upper, upper_source, size, witness)


@dataclass(frozen=True)
class CriterionResult:
    holds: bool
    margin: float | None
    certified: bool
    heuristic_only: bool = False
    threshold: float = SQRT_HALF


def criterion_check(h_lower: float | None, provenance=Provenance.CERTIFIED) -> CriterionResult:
    """Is the certified lower bound on h strictly above sqrt(1/2)?"""
    if isinstance(provenance, str) and not isinstance(provenance, Provenance):
        provenance = Provenance.NONE if provenance == "none" else Provenance.CERTIFIED
    if h_lower is None or not provenance.certified:
        return CriterionResult(False, None, False, heuristic_only=True)
    return CriterionResult(h_lower > SQRT_HALF, h_lower - SQRT_HALF, True)


@dataclass
class PowerWitness:
    n: int | None
    bounds: HBounds | None
    trail: list[tuple[int, HBounds]]

    @property
    def found(self) -> bool:
        return self.n is not None


def witness_power_search(
    ctx: GroupContext, S0: GeneratorMultiset, rho_exact: float, n_max: int, rho_exact_is_exact: bool = True
) -> PowerWitness:
    """Smallest n <= n_max with (1 - rho^n) |S0|^n / (|S0|^n - 1) > sqrt(1/2).

    Uses rho(S0^n) = rho(S0)^n for symmetric S0 and the nominal multiset
    size |S0|^n.
    """
    if S0.ctx != ctx:
        raise ContextMismatchError("multiset belongs to a different context")
    if not S0.is_symmetric:
        raise ValueError("power search needs a symmetric base multiset")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    trail = []
    for n in range(1, n_max + 1):
        size = S0.size**n
        if size < 2:
            continue
        hb = mohar_bounds(rho_upper=rho_exact**n, size=size, rho_upper_exact=rho_exact_is_exact)
        hb.witness["n"] = n
        trail.append((n, hb))
        if criterion_check(hb.lower, hb.lower_provenance).holds:
            return PowerWitness(n, hb, trail)
    return PowerWitness(None, None, trail)


def isoperimetry_block(
    ctx: GroupContext,
    S: GeneratorMultiset,
    cand: FolnerCandidate,
    bounds: HBounds,
    method: str,
) -> dict:
    """JSON-ready summary of one search/bounds run."""
    crit = criterion_check(bounds.lower, bounds.lower_provenance)
    return {
        "group": ctx.spec(),
        "S": S.spec(),
        "method": method,
        "phi": f"{cand.phi.numerator}/{cand.phi.denominator}",
        "F": [str(g) for g in cand.elements],
        "h_lower": bounds.lower,
        "h_upper": bounds.upper,
        "provenance": {"lower": bounds.lower_source, "upper": bounds.upper_source},
        "criterion": crit.holds if crit.certified else None,
        "margin": crit.margin,
    }
