"""Finite balls of Cayley graphs and Schreier graphs over a generator multiset.

A ball stores, for each vertex and each multiset entry, the index of the
neighbour ``s_i * x`` (or -1 when it falls outside the ball).  Undirected
edges are obtained by pairing each entry with an entry for its inverse, so a
symmetric multiset of size m yields an m-regular multigraph in the interior.
"""

from __future__ import annotations

import gc
import io
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Hashable, Mapping

import numpy as np

from .errors import ActionError, BudgetError, ContextMismatchError
from .groups import Form, GeneratorMultiset, GroupContext, GroupElement, symmetrize

DEFAULT_MAX_VERTICES = 3_000_000


def inverse_pairing(ctx: GroupContext, forms: tuple[Form, ...]) -> tuple[int, ...]:
    """Involution on entry indices with forms[pair[i]] == forms[i]^-1.

    Self-inverse entries (identity, order-2 elements) are paired with
    themselves so that each entry keeps its own edge.
    """
    pending: dict[Form, list[int]] = {}
    pair = [-1] * len(forms)
    for i, f in enumerate(forms):
        fi = ctx.inv_forms(f)
        if fi == f:
            pair[i] = i
            continue
        queue = pending.get(fi)
        if queue:
            j = queue.pop(0)
            pair[i], pair[j] = j, i
        else:
            pending.setdefault(f, []).append(i)
    if any(p < 0 for p in pair):
        raise ValueError("multiset is not symmetric; no inverse pairing exists")
    return tuple(pair)


@dataclass(eq=False)
class Ball:
    """Radius-R ball around a base point, shared shape of Cayley and Schreier balls.

    ``targets[v, i]`` is the vertex reached from ``v`` by entry ``i`` (or -1).
    ``pairing`` is the inverse pairing of entries used to form undirected edges.
    """

    points: list
    index: dict
    dist: np.ndarray
    targets: np.ndarray
    radius: int
    multiset: GeneratorMultiset
    pairing: tuple[int, ...]
    label: str = ""

    @property
    def n_vertices(self) -> int:
        return len(self.points)

    @property
    def degree(self) -> int:
        return self.targets.shape[1]

    @property
    def center(self) -> int:
        return 0

    @cached_property
    def frontier(self) -> np.ndarray:
        """Boolean mask of boundary-incomplete vertices (distance == R)."""
        return self.dist == self.radius

    @cached_property
    def interior(self) -> np.ndarray:
        return np.flatnonzero(self.dist < self.radius)

    @cached_property
    def edges(self) -> np.ndarray:
        """Undirected edge list, shape (E, 3): columns (u, v, entry), sorted by (u, entry)."""
        n, m = self.targets.shape
        u = np.repeat(np.arange(n, dtype=np.int64), m)
        ent = np.tile(np.arange(m, dtype=np.int64), n)
        v = self.targets.reshape(-1).astype(np.int64)
        pair = np.asarray(self.pairing, dtype=np.int64)[ent]
        keep = (v >= 0) & ((u < v) | ((u == v) & (ent <= pair)))
        return np.stack([u[keep], v[keep], ent[keep]], axis=1)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def incidence(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """CSR incidence: for vertex x, ``edge_ids[ptr[x]:ptr[x+1]]`` and matching ``other`` ends."""
        e = self.edges
        n = self.n_vertices
        ends = np.concatenate([e[:, 0], e[:, 1]])
        other = np.concatenate([e[:, 1], e[:, 0]])
        eid = np.concatenate([np.arange(len(e)), np.arange(len(e))])
        order = np.argsort(ends, kind="stable")
        ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(ends, minlength=n), out=ptr[1:])
        return ptr, eid[order], other[order]

    def sphere(self, r: int) -> set[int]:
        return sphere(self, r)

    def dump_edges(self, out=None) -> str:
        """Edge list text: header line then ``u v entry_index`` per edge."""
        buf = io.StringIO()
        buf.write(f"# ball group={self.label} R={self.radius} |S|={self.multiset.size}\n")
        for u, v, i in self.edges.tolist():
            buf.write(f"{u} {v} {i}\n")
        text = buf.getvalue()
        if out is not None:
            out.write(text)
        return text


@dataclass(eq=False)
class CayleyBall(Ball):
    ctx: GroupContext | None = field(default=None)

    def element(self, i: int) -> GroupElement:
        return GroupElement(self.ctx, self.points[i])

    @property
    def center_element(self) -> GroupElement:
        return self.element(0)


@dataclass(eq=False)
class SchreierBall(Ball):
    pass


def _edge_multiset(S: GeneratorMultiset) -> GeneratorMultiset:
    if S.is_collapsed:
        raise ValueError("balls need explicit multiset entries, not a collapsed power")
    return S if S.is_symmetric else symmetrize(S)


def build_ball(
    ctx: GroupContext,
    S: GeneratorMultiset,
    R: int,
    center: GroupElement | None = None,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> CayleyBall:
    """BFS ball of radius R in the Cayley multigraph of (ctx, S).

    Non-symmetric S is symmetrized first.  Vertices are in BFS order with each
    sphere sorted by normal form.
    """
    if S.ctx != ctx:
        raise ContextMismatchError("multiset belongs to a different context")
    if R < 0:
        raise ValueError("radius must be >= 0")
    Ssym = _edge_multiset(S)
    forms = Ssym.entries
    c = ctx.identity_form if center is None else ctx.element(center).form
    support = list(dict.fromkeys(forms))
    lefts = [ctx.left_multiplier(s) for s in support]
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        return _bfs_ball(ctx, Ssym, forms, support, lefts, c, R, max_vertices)
    finally:
        if gc_was_enabled:
            gc.enable()


def _bfs_ball(ctx, Ssym, forms, support, lefts, c, R, max_vertices) -> CayleyBall:

    points = [c]
    index = {c: 0}
    dist = [0]
    nbrs: list[list[Form]] = []
    level = [c]
    for r in range(R + 1):
        new = set()
        for x in level:
            row = [left(x) for left in lefts]
            nbrs.append(row)
            if r < R:
                new.update(y for y in row if y not in index)
        if r == R:
            break
        if len(points) + len(new) > max_vertices:
            raise BudgetError(
                f"ball of radius {R} exceeds {max_vertices} vertices", stage="build_ball"
            )
        level = sorted(new)
        for y in level:
            index[y] = len(points)
            points.append(y)
            dist.append(r + 1)
    get = index.get
    sup_targets = np.array([[get(y, -1) for y in row] for row in nbrs], dtype=np.int64)
    sup_targets = sup_targets.reshape(len(points), len(support))
    col = {s: j for j, s in enumerate(support)}
    targets = sup_targets[:, [col[f] for f in forms]]
    return CayleyBall(
        points=points,
        index=index,
        dist=np.asarray(dist, dtype=np.int64),
        targets=targets,
        radius=R,
        multiset=Ssym,
        pairing=inverse_pairing(ctx, forms),
        label=ctx.spec(),
        ctx=ctx,
    )


def sphere(ball: Ball, r: int) -> set[int]:
    """Indices of the vertices at distance exactly r from the center."""
    if r < 0 or r > ball.radius:
        raise IndexError(f"sphere radius {r} outside 0..{ball.radius}")
    return set(np.flatnonzero(ball.dist == r).tolist())


def _resolve_action(ctx: GroupContext, action: Mapping[Any, Callable]) -> dict:
    maps = {}
    for key, fn in action.items():
        form = ctx.element(key).form
        letters = ctx.letters_of(form)
        if len(letters) != 1:
            raise ActionError(f"action key {key!r} is not a single generator letter")
        maps[form] = fn
    return maps


def build_schreier_ball(
    ctx: GroupContext,
    action: Mapping[Any, Callable[[Hashable], Hashable]],
    S: GeneratorMultiset,
    basepoint: Hashable,
    R: int,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> SchreierBall:
    """Orbit ball of radius R around ``basepoint`` for a left action given per letter.

    ``action`` maps generator letters and their inverses (e.g. ``"a"`` and
    ``"a^-1"``) to point maps.  Letters whose inverse map is missing, or whose
    maps fail to invert each other on visited points, raise ActionError.
    """
    maps = _resolve_action(ctx, action)
    Ssym = _edge_multiset(S)
    forms = Ssym.entries

    def letter_map(letter: Form):
        fn = maps.get(letter)
        if fn is None:
            raise ActionError(f"no action given for letter {ctx.format_form(letter)}")
        if ctx.inv_forms(letter) not in maps:
            raise ActionError(
                f"letter {ctx.format_form(letter)} has no inverse map; cannot symmetrize"
            )
        return fn

    words = {f: [letter_map(l) for l in reversed(ctx.letters_of(f))] for f in set(forms)}

    def act(f: Form, x):
        for fn in words[f]:
            x = fn(x)
        return x

    inverse_checks = [(l, ctx.inv_forms(l)) for l in maps]

    points = [basepoint]
    index = {basepoint: 0}
    dist = [0]
    level = [basepoint]
    for r in range(1, R + 1):
        new = []
        for x in level:
            for f in forms:
                y = act(f, x)
                if y not in index:
                    index[y] = len(points)
                    points.append(y)
                    dist.append(r)
                    new.append(y)
        if len(points) > max_vertices:
            raise BudgetError("Schreier ball exceeds vertex budget", stage="build_schreier_ball")
        level = new
    for x in points:
        for l, li in inverse_checks:
            if maps[li](maps[l](x)) != x:
                raise ActionError(
                    f"map for {ctx.format_form(li)} does not invert {ctx.format_form(l)} at {x!r}"
                )
    targets = np.full((len(points), len(forms)), -1, dtype=np.int64)
    for v, x in enumerate(points):
        for i, f in enumerate(forms):
            targets[v, i] = index.get(act(f, x), -1)
    return SchreierBall(
        points=points,
        index=index,
        dist=np.asarray(dist, dtype=np.int64),
        targets=targets,
        radius=R,
        multiset=Ssym,
        pairing=inverse_pairing(ctx, forms),
        label=f"schreier({ctx.spec()})",
    )
