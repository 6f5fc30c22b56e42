"""Spectral radius of the random walk driven by a generator multiset.

Two exact routes give the return probabilities p_n = mu^{*n}(e) of the walk
with step law mu = 1_S / |S|:

* pruned group-algebra convolution (any family; exponential cost on free
  families), and
* first-passage generating functions for nearest-neighbour walks on free
  products (free groups and free products of cyclics), computed as truncated
  integer power series.

For symmetric S, p_{2n}^{1/(2n)} increases to rho, so each term is a certified
lower bound.  A third route compresses the convolution operator to a finite
ball and runs power iteration in floating point.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .cayley import Ball
from .errors import BudgetError, ContextMismatchError, MethodNotApplicableError
from .groups import Form, GeneratorMultiset, GroupContext, GroupElement
from .provenance import Provenance

DEFAULT_MAX_SUPPORT = 2_000_000


@dataclass(frozen=True)
class WalkMeasure:
    """Finitely supported probability measure on a group, exact rational weights."""

    ctx: GroupContext
    weights: dict  # form -> Fraction

    def __post_init__(self):
        if any(w <= 0 for w in self.weights.values()):
            raise ValueError("walk measure weights must be positive")

    @classmethod
    def uniform(cls, S: GeneratorMultiset) -> "WalkMeasure":
        return cls(S.ctx, {f: Fraction(c, S.size) for f, c in S.counts})

    @classmethod
    def delta(cls, ctx: GroupContext, g=None) -> "WalkMeasure":
        form = ctx.identity_form if g is None else ctx.element(g).form
        return cls(ctx, {form: Fraction(1)})

    def mass(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))

    def __call__(self, g) -> Fraction:
        return self.weights.get(self.ctx.element(g).form, Fraction(0))

    def support(self) -> list[GroupElement]:
        return [GroupElement(self.ctx, f) for f in self.weights]


def convolve_step(ctx: GroupContext, mu: WalkMeasure, nu: WalkMeasure) -> WalkMeasure:
    """(mu * nu)(x) = sum_g mu(g) nu(g^-1 x)."""
    if mu.ctx != ctx or nu.ctx != ctx:
        raise ContextMismatchError("measures belong to a different context")
    out: dict = {}
    mul = ctx.mul_forms
    for g, a in mu.weights.items():
        for h, b in nu.weights.items():
            x = mul(g, h)
            out[x] = out.get(x, 0) + a * b
    return WalkMeasure(ctx, {x: w for x, w in out.items() if w})


# ---------------------------------------------------------------------------
# return probabilities


def returns_by_convolution(
    ctx: GroupContext, S: GeneratorMultiset, N: int, max_support: int = DEFAULT_MAX_SUPPORT
) -> list[Fraction]:
    """p_1..p_N by repeated convolution, pruning mass that cannot return in time.

    A point x is dropped after step k when its length exceeds (N - k) times
    the longest support element, since the walk cannot get back to e.
    """
    if S.ctx != ctx:
        raise ContextMismatchError("multiset belongs to a different context")
    step = S.counts
    reach = max(S.max_length, 1)
    length, mul, e = ctx.length, ctx.mul_forms, ctx.identity_form
    cur = {e: 1}
    out = []
    for k in range(1, N + 1):
        horizon = (N - k) * reach
        nxt: dict = {}
        for g, cg in cur.items():
            for s, cs in step:
                x = mul(g, s)
                if length(x) <= horizon:
                    nxt[x] = nxt.get(x, 0) + cg * cs
        if len(nxt) > max_support:
            raise BudgetError(
                f"convolution support {len(nxt)} exceeds {max_support} at step {k}",
                stage="returns_by_convolution",
            )
        cur = nxt
        out.append(Fraction(cur.get(e, 0), S.size**k))
    return out


def _smul(a, b, N):
    out = [0] * (N + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(N + 1 - i):
                if b[j]:
                    out[i + j] += x * b[j]
    return out


def _geom(a, N):
    """1 / (1 - a) for a series with zero constant term."""
    g = [0] * (N + 1)
    g[0] = 1
    for n in range(1, N + 1):
        g[n] = sum(a[k] * g[n - k] for k in range(1, n + 1) if a[k])
    return g


def _shift(a, c, N):
    """c * y * a(y)."""
    return [0] + [c * x for x in a[:N]]


def _nearest_neighbour_factors(ctx: GroupContext, S: GeneratorMultiset):
    """Group the step counts by free factor, or None when S is not letter-supported."""
    if not ctx.has_prefix_structure:
        return None
    e = ctx.identity_form
    factors: dict[int, dict] = {}
    for f, c in S.counts:
        if f == e:
            continue
        if len(f) != 1:
            return None
        if ctx.family == "free":
            factors.setdefault(abs(f[0]), {})[1 if f[0] > 0 else -1] = c
        else:
            fac, exp = f[0]
            factors.setdefault(fac, {})[exp] = c
    return factors


def returns_by_first_passage(ctx: GroupContext, S: GeneratorMultiset, N: int) -> list[Fraction]:
    """p_1..p_N for a walk whose steps are single letters of a free product.

    With y = z/|S| all generating functions have integer coefficients:
    Q_g is the first-passage series from a letter g of one factor back to the
    base point, loops at intermediate points are excursions into the other
    factors (or identity steps), and G = 1/(1 - U) with U the first-return
    series.
    """
    factors = _nearest_neighbour_factors(ctx, S)
    if factors is None:
        raise MethodNotApplicableError(
            "first-passage route needs a free-product group and single-letter steps"
        )
    c_id = S.count_map.get(ctx.identity_form, 0)
    hold = [0] * (N + 1)
    if N >= 1:
        hold[1] = c_id
    keys = sorted(factors)

    def order(j):
        return None if ctx.family == "free" else ctx.params[j]

    Q = {j: {g: [0] * (N + 1) for g in _factor_states(order(j), factors[j])} for j in keys}
    E = {j: [0] * (N + 1) for j in keys}
    for _ in range(N + 1):
        total_E = [sum(E[j][n] for j in keys) for n in range(N + 1)]
        newQ = {}
        for j in keys:
            L = [hold[n] + total_E[n] - E[j][n] for n in range(N + 1)]
            H = _geom(L, N)
            steps = factors[j]
            n_j = order(j)
            qj = {}
            if n_j is None:
                cp, cm = steps.get(1, 0), steps.get(-1, 0)
                for sign, c_fwd, c_back in ((1, cp, cm), (-1, cm, cp)):
                    q = Q[j][sign]
                    inner = _shift(_smul(q, q, N), c_fwd, N)
                    inner[1] += c_back
                    qj[sign] = _smul(H, inner, N)
            else:
                for g in Q[j]:
                    inner = [0] * (N + 1)
                    for x, c in steps.items():
                        t = (g + x) % n_j
                        if t == 0:
                            if N >= 1:
                                inner[1] += c
                        else:
                            inner = [a + b for a, b in zip(inner, _shift(Q[j][t], c, N))]
                    qj[g] = _smul(H, inner, N)
            newQ[j] = qj
        Q = newQ
        newE = {}
        for j in keys:
            acc = [0] * (N + 1)
            for x, c in factors[j].items():
                state = x if order(j) is None else x % order(j)
                acc = [a + b for a, b in zip(acc, _shift(Q[j][state], c, N))]
            newE[j] = acc
        E = newE
    U = [hold[n] + sum(E[j][n] for j in keys) for n in range(N + 1)]
    G = _geom(U, N)
    return [Fraction(G[n], S.size**n) for n in range(1, N + 1)]


def _factor_states(n_j, steps):
    if n_j is None:
        return (1, -1)
    return tuple(range(1, n_j))


def return_probabilities(
    ctx: GroupContext,
    S: GeneratorMultiset,
    N: int,
    method: str = "auto",
    max_support: int = DEFAULT_MAX_SUPPORT,
) -> list[Fraction]:
    """Exact p_1..p_N of the S-walk at the identity.

    ``method`` is ``"first-passage"``, ``"convolution"`` or ``"auto"`` (first
    passage when applicable, otherwise pruned convolution).
    """
    if S.ctx != ctx:
        raise ContextMismatchError("multiset belongs to a different context")
    if N < 1:
        raise ValueError("N must be >= 1")
    if not S.is_symmetric:
        raise MethodNotApplicableError(
            "return probabilities certify rho only for symmetric S; "
            "use rho_power_iteration for non-symmetric multisets"
        )
    if method == "auto":
        method = (
            "first-passage"
            if _nearest_neighbour_factors(ctx, S) is not None
            else "convolution"
        )
    if method == "first-passage":
        return returns_by_first_passage(ctx, S, N)
    if method == "convolution":
        return returns_by_convolution(ctx, S, N, max_support=max_support)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# estimates


@dataclass
class RhoEstimate:
    method: str
    lower_bounds: list[float]
    best: float
    provenance: Provenance
    exact: float | None = None
    note: str = ""
    extra: dict = field(default_factory=dict)


def _root(p: Fraction, k: int) -> float:
    if p == 0:
        return 0.0
    return math.exp((math.log(p.numerator) - math.log(p.denominator)) / k)


def rho_lower_from_returns(p: list[Fraction]) -> RhoEstimate:
    """Lower bounds p_{2n}^{1/(2n)} for every even step available in ``p``."""
    if not p:
        raise ValueError("empty return-probability sequence")
    bounds = [_root(p[2 * n - 1], 2 * n) for n in range(1, len(p) // 2 + 1)]
    if not bounds:
        raise ValueError("need at least p_2 for a lower bound")
    return RhoEstimate(
        method="returns",
        lower_bounds=bounds,
        best=max(bounds),
        provenance=Provenance.CERTIFIED,
        note="p_2n^(1/2n) <= rho for symmetric S",
    )


def free_group_rho(k: int) -> float:
    """Closed-form spectral radius sqrt(2k-1)/k of the simple walk on free(k)."""
    return math.sqrt(2 * k - 1) / k


def closed_form_rho(ctx: GroupContext, S: GeneratorMultiset) -> float | None:
    """Exact rho when S is a uniform multiple of the standard symmetric set of free(k)."""
    if ctx.family != "free" or S.ctx != ctx:
        return None
    std = {f for f, _ in ctx.standard_symmetric().counts}
    cm = S.count_map
    if set(cm) != std or len(set(cm.values())) != 1:
        return None
    return free_group_rho(ctx.rank)


def compression_matrix(ball: Ball, S: GeneratorMultiset | None = None) -> sp.csr_matrix:
    """Matrix of f -> (1/|S|) 1_S * f restricted to functions on the ball.

    Entry (x, y) counts entries s with s*y = x.  ``S`` must be the ball's
    multiset or its leading (pre-symmetrization) segment.
    """
    full = ball.multiset
    if S is None:
        S = full
    m = S.size
    if S.entries is None or tuple(full.entries[:m]) != tuple(S.entries):
        raise ValueError("S must be the ball's multiset or the part it was symmetrized from")
    t = ball.targets[:, :m]
    ys, cols = np.nonzero(t >= 0)
    xs = t[ys, cols]
    n = ball.n_vertices
    return sp.csr_matrix(
        (np.full(len(xs), 1.0 / m), (xs, ys)), shape=(n, n)
    )


def rho_power_iteration(
    ball: Ball, S: GeneratorMultiset | None = None, iters: int = 500, seed: int | None = None
) -> RhoEstimate:
    """Lower bound on rho from the ball compression of the convolution operator.

    Starts from the indicator of the center (or a seeded positive random
    vector when ``seed`` is given) and records ||A v|| / ||v|| after every
    renormalized step.  Compression never increases the norm, so each value
    is a lower bound; for non-symmetric S the iteration runs on A^T A and the
    result is flagged heuristic.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    S = ball.multiset if S is None else S
    A = compression_matrix(ball, S)
    symmetric = S.is_symmetric
    n = ball.n_vertices
    if seed is None:
        v = np.zeros(n)
        v[ball.center] = 1.0
    else:
        v = np.random.default_rng(seed).random(n) + 1e-3
        v /= np.linalg.norm(v)
    AT = A.T.tocsr()
    bounds = []
    for _ in range(iters):
        w = A @ v
        nw = float(np.linalg.norm(w))
        bounds.append(nw)
        if nw == 0.0:
            break
        if symmetric:
            v = w / nw
        else:
            u = AT @ w
            v = u / np.linalg.norm(u)
    return RhoEstimate(
        method="power-iteration",
        lower_bounds=bounds,
        best=max(bounds),
        provenance=Provenance.CERTIFIED if symmetric else Provenance.HEURISTIC,
        note=f"ball compression, R={ball.radius}, {iters} iterations, float64",
        extra={"radius": ball.radius, "iters": iters, "seed": seed},
    )


def write_returns_csv(p: list[Fraction], out) -> None:
    """CSV with columns n, p_2n_num, p_2n_den, lower_bound_float."""
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["n", "p_2n_num", "p_2n_den", "lower_bound_float"])
    for n in range(1, len(p) // 2 + 1):
        q = p[2 * n - 1]
        w.writerow([n, q.numerator, q.denominator, repr(_root(q, 2 * n))])
