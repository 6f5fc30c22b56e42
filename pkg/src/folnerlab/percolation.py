"""Bernoulli bond percolation on finite Cayley and Schreier balls.

Edge e of sample i is open at parameter p iff U(seed, i, e) < p, with U the
counter-based uniform of :mod:`folnerlab.rng`.  All parameters therefore share
one variate per edge (the standard monotone coupling), and results depend
only on the seed, never on the evaluation order or the worker count.

"Infinite cluster" is proxied by "touches the sphere of radius R".
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .cayley import Ball
from .errors import InvariantViolation, UncertifiedInputError
from .provenance import Provenance
from .rng import uniforms

Z95 = 1.959963984540054


@dataclass(frozen=True)
class PercolationConfig:
    p: float
    samples: int
    seed: int
    boundary_radius: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.samples < 1:
            raise ValueError("need at least one sample")


@dataclass(frozen=True)
class ClusterStats:
    root_reaches_boundary: bool
    cluster_sizes: tuple[int, ...]  # descending
    boundary_clusters: int
    open_edges: int
    sphere_clusters: int = 0  # clusters meeting sphere(R), crossing or not


def open_edges(ball: Ball, p: float, seed: int, sample: int) -> np.ndarray:
    """Boolean mask over ``ball.edges`` of the edges open in this sample."""
    u = uniforms(seed, sample, np.arange(ball.n_edges))
    return u < p


def _labels(ball: Ball, mask: np.ndarray) -> np.ndarray:
    e = ball.edges[mask]
    n = ball.n_vertices
    g = coo_matrix((np.ones(len(e), dtype=np.int8), (e[:, 0], e[:, 1])), shape=(n, n))
    return connected_components(g, directed=False)[1]


def percolate_once(
    ball: Ball, p: float, seed: int, sample: int = 0, inner_radius: int | None = None
) -> ClusterStats:
    """Full cluster census of one percolation sample.

    ``boundary_clusters`` counts clusters that meet the outer sphere and also
    reach within ``inner_radius`` (default R // 2) of the center, i.e. clusters
    crossing the annulus.
    """
    mask = open_edges(ball, p, seed, sample)
    labels = _labels(ball, mask)
    R = ball.radius
    r_in = R // 2 if inner_radius is None else inner_radius
    outer = np.unique(labels[ball.dist == R])
    inner = np.unique(labels[ball.dist <= r_in])
    crossing = np.intersect1d(outer, inner, assume_unique=True)
    if R == 0:
        crossing = outer
    sizes = np.bincount(labels)
    return ClusterStats(
        root_reaches_boundary=bool(labels[ball.center] in set(outer.tolist())),
        cluster_sizes=tuple(sorted(sizes.tolist(), reverse=True)),
        boundary_clusters=int(len(crossing)),
        open_edges=int(mask.sum()),
        sphere_clusters=int(len(outer)),
    )


class _RootExplorer:
    """Level-synchronous BFS of the root cluster, drawing only the edges it touches."""

    def __init__(self, ball: Ball):
        self.ball = ball
        self.ptr, self.eid, self.other = ball.incidence
        self.visited = np.zeros(ball.n_vertices, dtype=bool)
        self.target = ball.radius

    def reaches(self, p: float, seed: int, sample: int) -> bool:
        c = self.ball.center
        if self.ball.dist[c] == self.target:
            return True
        if p <= 0.0:
            return False
        visited, dist = self.visited, self.ball.dist
        frontier = np.array([c], dtype=np.int64)
        touched = [frontier]
        visited[c] = True
        hit = False
        try:
            while frontier.size:
                starts = self.ptr[frontier]
                counts = self.ptr[frontier + 1] - starts
                total = int(counts.sum())
                if not total:
                    break
                offs = np.repeat(starts - np.cumsum(counts) + counts, counts) + np.arange(total)
                eids = self.eid[offs]
                nb = self.other[offs]
                keep = ~visited[nb]
                eids, nb = eids[keep], nb[keep]
                if not nb.size:
                    break
                op = uniforms(seed, sample, eids) < p
                nxt = np.unique(nb[op])
                if not nxt.size:
                    break
                visited[nxt] = True
                touched.append(nxt)
                if (dist[nxt] == self.target).any():
                    hit = True
                    break
                frontier = nxt
        finally:
            for t in touched:
                visited[t] = False
        return hit


def _chunks(n: int, workers: int) -> list[range]:
    workers = max(1, min(workers, n))
    step = -(-n // workers)
    return [range(i, min(n, i + step)) for i in range(0, n, step)]


def _count_hits(ball: Ball, p: float, seed: int, samples: range) -> int:
    ex = _RootExplorer(ball)
    return sum(ex.reaches(p, seed, i) for i in samples)


def reach_indicators(ball: Ball, p: float, seed: int, N: int) -> np.ndarray:
    ex = _RootExplorer(ball)
    return np.array([ex.reaches(p, seed, i) for i in range(N)], dtype=bool)


def wilson_interval(k: int, n: int, z: float = Z95) -> tuple[float, float]:
    if n <= 0:
        raise ValueError("n must be positive")
    phat = k / n
    denom = 1 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if k == 0 else max(0.0, centre - half)
    hi = 1.0 if k == n else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class ThetaPoint:
    p: float
    theta: float
    ci_lo: float
    ci_hi: float
    n_samples: int
    hits: int
    boundary_clusters_mean: float | None = None

    @property
    def wilson_sigma(self) -> float:
        """Half-width of the 95% Wilson interval expressed in standard deviations."""
        return (self.ci_hi - self.ci_lo) / (2 * Z95)


def theta_hat(ball: Ball, p: float, N: int, seed: int, workers: int = 1) -> ThetaPoint:
    """Fraction of N coupled samples in which the root cluster reaches sphere(R)."""
    PercolationConfig(p, N, seed)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            hits = sum(pool.map(lambda r: _count_hits(ball, p, seed, r), _chunks(N, workers)))
    else:
        hits = _count_hits(ball, p, seed, range(N))
    lo, hi = wilson_interval(hits, N)
    return ThetaPoint(p, hits / N, lo, hi, N, hits)


def tree_theta_oracle(b: int, d: int, p, R: int):
    """Exact probability that the root of a depth-R tree (root degree d,
    branching b below) connects to depth R.

    u_1 = 1 - p, u_{r+1} = 1 - p (1 - u_r^b), theta_R = 1 - u_R^d.
    Returns a Fraction when p is a Fraction or int, else a float.
    """
    if b < 1 or d < 1 or R < 1:
        raise ValueError("need b, d, R >= 1")
    exact = isinstance(p, (Fraction, int))
    one = Fraction(1) if exact else 1.0
    u = one - p
    for _ in range(R - 1):
        u = one - p * (one - u**b)
    return one - u**d


@dataclass
class PcEstimate:
    p_c: float
    ci: tuple[float, float]
    tau: float
    method: str
    evaluations: list[ThetaPoint] = field(default_factory=list)
    provenance: Provenance = Provenance.MONTE_CARLO


def _bisect(f, lo: float, hi: float, tol: float) -> float:
    """Crossing of a non-decreasing step function f: returns midpoint of final bracket."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def pc_estimate(
    ball: Ball,
    N: int,
    seed: int,
    tau: float = 0.05,
    tol: float = 1e-3,
    workers: int = 1,
) -> PcEstimate:
    """Bisection for theta_hat(p) = tau over coupled samples.

    The interval reported brackets the crossings of the Wilson upper and
    lower limits with tau.
    """
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie in (0, 1)")
    cache: dict[float, ThetaPoint] = {}

    def point(p):
        if p not in cache:
            cache[p] = theta_hat(ball, p, N, seed, workers)
        return cache[p]

    est = _bisect(lambda p: point(p).theta >= tau, 0.0, 1.0, tol)
    ci_lo = _bisect(lambda p: point(p).ci_hi >= tau, 0.0, 1.0, tol)
    ci_hi = _bisect(lambda p: point(p).ci_lo >= tau, 0.0, 1.0, tol)
    evals = sorted(cache.values(), key=lambda t: t.p)
    for a, b in zip(evals, evals[1:]):
        if b.hits < a.hits:
            raise InvariantViolation(f"coupled theta not monotone between p={a.p} and p={b.p}")
    return PcEstimate(est, (ci_lo, ci_hi), tau, "coupled-bisection", evals)


@dataclass(frozen=True)
class BoundReport:
    value: float
    provenance: Provenance
    note: str


def bs_pc_bound(size: int, h: float, provenance=Provenance.CERTIFIED) -> BoundReport:
    """p_c <= 1 / (|S| h + 1), valid for h exact or a certified lower bound."""
    prov = Provenance(provenance) if isinstance(provenance, str) else provenance
    if not prov.certified:
        raise UncertifiedInputError(
            "an upper bound or heuristic value of h certifies nothing about p_c"
        )
    if h < 0:
        raise ValueError("h must be non-negative")
    return BoundReport(1.0 / (size * h + 1.0), Provenance.CERTIFIED, f"|S|={size}, h={h!r}")


@dataclass
class ProbeReport:
    histogram: dict[int, int]
    mean: float
    samples: int
    inner_radius: int
    certified: bool = False
    note: str = "finite-volume proxy for the number of infinite clusters; not a certificate"


def uniqueness_probe(
    ball: Ball, p: float, N: int, seed: int, inner_radius: int | None = None, workers: int = 1
) -> ProbeReport:
    """Distribution of the number of clusters crossing from radius R//2 to R."""
    PercolationConfig(p, N, seed)
    r_in = ball.radius // 2 if inner_radius is None else inner_radius

    def run(idx):
        return [percolate_once(ball, p, seed, i, r_in).boundary_clusters for i in idx]

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            counts = [c for part in pool.map(run, _chunks(N, workers)) for c in part]
    else:
        counts = run(range(N))
    hist = dict(sorted(Counter(counts).items()))
    return ProbeReport(hist, sum(counts) / N, N, r_in)


def uniqueness_criterion_report(
    rho_upper: float,
    rho_provenance,
    pc_upper: float,
    pc_provenance,
    size: int,
) -> dict:
    """Arithmetic check of rho * p_c * |S| < 1 from certified bounds only."""
    rp = Provenance(rho_provenance) if isinstance(rho_provenance, str) else rho_provenance
    pp = Provenance(pc_provenance) if isinstance(pc_provenance, str) else pc_provenance
    product = rho_upper * pc_upper * size
    certified = rp.certified and pp.certified
    return {
        "rho_upper": rho_upper,
        "pc_upper": pc_upper,
        "size": size,
        "product": product,
        "inputs_certified": certified,
        "pc_lt_pu_certified": bool(certified and product < 1.0),
    }


def theta_curve(
    ball: Ball,
    ps,
    N: int,
    seed: int,
    probe_samples: int = 0,
    workers: int = 1,
) -> list[ThetaPoint]:
    out = []
    for p in ps:
        t = theta_hat(ball, p, N, seed, workers)
        if probe_samples:
            mean = uniqueness_probe(ball, p, probe_samples, seed, workers=workers).mean
            t = ThetaPoint(t.p, t.theta, t.ci_lo, t.ci_hi, t.n_samples, t.hits, mean)
        out.append(t)
    return out


CSV_COLUMNS = ["p", "theta_hat", "ci_lo", "ci_hi", "n_samples", "boundary_clusters_mean"]


def write_theta_csv(points: list[ThetaPoint], out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for t in points:
        w.writerow(
            [
                repr(float(t.p)),
                repr(t.theta),
                repr(t.ci_lo),
                repr(t.ci_hi),
                t.n_samples,
                "" if t.boundary_clusters_mean is None else repr(t.boundary_clusters_mean),
            ]
        )
