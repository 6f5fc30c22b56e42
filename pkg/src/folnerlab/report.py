"""Pipelines behind the command-line front end, and their report formats.

Every number in a JSON report is wrapped as ``{"value": ..., "provenance": ...}``
(exact rationals also carry ``"exact": "num/den"``).  Reports contain no
timings or worker counts, so equal seeds give byte-identical files.
"""

from __future__ import annotations

import io
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib import resources

from . import dixmier as dx
from .cayley import build_ball
from .groups import GeneratorMultiset, GroupContext, parse_group, parse_multiset
from .isoperimetry import criterion_check, folner_search, mohar_bounds, phi, witness_power_search
from .percolation import (
    bs_pc_bound,
    pc_estimate,
    theta_hat,
    uniqueness_criterion_report,
    uniqueness_probe,
    write_theta_csv,
    ThetaPoint,
)
from .provenance import Provenance
from .spectral import closed_form_rho, return_probabilities, rho_lower_from_returns

SEED_ENV = "FOLNERLAB_SEED"
EXIT_CERTIFIED, EXIT_ERROR, EXIT_NOT_CERTIFIED = 0, 2, 3


def default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


def schema() -> dict:
    return json.loads(resources.files("folnerlab").joinpath("run_report.schema.json").read_text())


def q(value, provenance: Provenance) -> dict:
    """A tagged quantity."""
    out = {"provenance": str(provenance)}
    if isinstance(value, Fraction):
        out["value"] = float(value)
        out["exact"] = f"{value.numerator}/{value.denominator}"
    else:
        out["value"] = value
    return out


@dataclass
class RunReport:
    command: str
    group: str | None
    multiset: str | None
    seed: int | None
    stages: dict = field(default_factory=dict)
    ledger: list = field(default_factory=list)
    verdict: dict | None = None
    exit_code: int = EXIT_NOT_CERTIFIED
    lines: list = field(default_factory=list)  # human-readable summary, not serialized

    def record(self, stage: str, name: str, value, provenance: Provenance) -> dict:
        item = q(value, provenance)
        self.stages.setdefault(stage, {})[name] = item
        self.ledger.append({"stage": stage, "quantity": name, "provenance": str(provenance)})
        return item

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("lines")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# criterion


@dataclass(frozen=True)
class CriterionConfig:
    group: str
    multiset: str = "std"
    n_max: int = 12
    return_steps: int = 20
    radius: int = 6
    search_budget: int = 20_000
    box_side: int = 20
    max_vertices: int = 3_000_000


def _upper_h_candidate(ctx: GroupContext, S: GeneratorMultiset, cfg: CriterionConfig):
    if ctx.family == "zd":
        pts = [()]
        for _ in range(ctx.rank):
            pts = [p + (i,) for p in pts for i in range(cfg.box_side)]
        return phi(ctx, S, pts), "box"
    ball = build_ball(ctx, S, cfg.radius, max_vertices=cfg.max_vertices)
    res = folner_search(ball, S if S.is_symmetric else None, mode="anneal", budget=cfg.search_budget, seed=0)
    return res.best, "anneal"


def run_criterion(cfg: CriterionConfig) -> RunReport:
    ctx = parse_group(cfg.group)
    S = parse_multiset(ctx, cfg.multiset)
    rep = RunReport("criterion", ctx.spec(), S.spec(), None)
    L = rep.lines

    p = return_probabilities(ctx, S, cfg.return_steps)
    est = rho_lower_from_returns(p)
    rep.record("returns", "rho_lower", est.best, est.provenance)
    rep.record("returns", "p_2", p[1], Provenance.EXACT)
    L.append(f"rho >= {est.best:.6f} from p_2n^(1/2n), n <= {cfg.return_steps // 2}")

    rho = closed_form_rho(ctx, S)
    if rho is not None:
        rep.record("closed_form", "rho", rho, Provenance.EXACT)
        L.append(f"rho = {rho:.12f} (closed form)")
        if est.best > rho + 1e-12:
            raise AssertionError("lower bound on rho exceeds the closed form")

    cand, how = _upper_h_candidate(ctx, S, cfg)
    hs = mohar_bounds(rho_lower=est.best).with_candidate(cand)
    rep.record("h_of_S", "h_upper", hs.upper, Provenance.CERTIFIED)
    rep.stages["h_of_S"]["upper_source"] = hs.upper_source
    rep.stages["h_of_S"]["candidate_method"] = how
    L.append(f"h(S) <= {hs.upper:.6f} ({hs.upper_source})")

    if rho is None:
        L.append("no exact or certified upper bound on rho: criterion cannot be certified")
        rep.exit_code = EXIT_NOT_CERTIFIED
        return rep

    w = witness_power_search(ctx, S, rho, cfg.n_max)
    trail = [{"n": n, "h_lower": q(hb.lower, hb.lower_provenance)} for n, hb in w.trail]
    rep.stages["power_search"] = {"trail": trail, "n_max": cfg.n_max}
    if not w.found:
        L.append(f"no power n <= {cfg.n_max} gives h_lower > sqrt(1/2)")
        rep.exit_code = EXIT_NOT_CERTIFIED
        return rep
    n, hb = w.n, w.bounds
    size = S.size**n
    crit = criterion_check(hb.lower, hb.lower_provenance)
    rep.stages["power_search"]["n"] = n
    rep.record("power_search", "h_lower", hb.lower, hb.lower_provenance)
    rep.record("power_search", "margin", crit.margin, Provenance.CERTIFIED)
    L.append(f"n = {n}: h(S^n) >= {hb.lower:.6f} > sqrt(1/2) = {math.sqrt(0.5):.6f}")

    pc = bs_pc_bound(size, hb.lower, hb.lower_provenance)
    rep.record("arithmetic_trail", "pc_upper", pc.value, pc.provenance)
    rep.record("arithmetic_trail", "rho_power", rho**n, Provenance.EXACT)
    un = uniqueness_criterion_report(rho**n, Provenance.EXACT, pc.value, pc.provenance, size)
    rep.record("arithmetic_trail", "product", un["product"], Provenance.CERTIFIED)
    rep.stages["arithmetic_trail"]["size"] = size
    rep.stages["arithmetic_trail"]["pc_lt_pu_certified"] = un["pc_lt_pu_certified"]
    L.append(f"p_c(S^n) <= {pc.value:.6e};  rho^n p_c |S|^n = {un['product']:.6f} < 1")

    if crit.certified:
        rep.verdict = {"holds": crit.holds, "certified": True, "n": n}
    rep.exit_code = EXIT_CERTIFIED if crit.certified and crit.holds and un["pc_lt_pu_certified"] else EXIT_NOT_CERTIFIED
    L.append("verdict: certified" if rep.exit_code == EXIT_CERTIFIED else "verdict: not certified")
    return rep


# ---------------------------------------------------------------------------
# percolation


@dataclass(frozen=True)
class PercolateRunConfig:
    group: str
    multiset: str = "std"
    radius: int = 8
    ps: tuple[float, ...] = ()
    pc: bool = False
    samples: int = 2000
    seed: int = 0
    tau: float = 0.05
    probe_samples: int = 50
    h: float | None = None
    h_provenance: str = "exact"
    workers: int = 1
    max_vertices: int = 3_000_000


def _exact_tree_h(ctx: GroupContext, S: GeneratorMultiset) -> float | None:
    if closed_form_rho(ctx, S) is None:
        return None
    k = ctx.rank
    return (k - 1) / k  # boundary ratio of the 2k-regular tree


def run_percolate(cfg: PercolateRunConfig) -> tuple[RunReport, list[ThetaPoint]]:
    ctx = parse_group(cfg.group)
    S = parse_multiset(ctx, cfg.multiset)
    if not cfg.ps and not cfg.pc:
        raise ValueError("give --p values or --pc")
    ball = build_ball(ctx, S, cfg.radius, max_vertices=cfg.max_vertices)
    rep = RunReport("percolate", ctx.spec(), ball.multiset.spec(), cfg.seed)
    rep.stages["config"] = {"radius": cfg.radius, "samples": cfg.samples, "tau": cfg.tau,
                            "probe_samples": cfg.probe_samples,
                            "proxy": "cluster reaches sphere(R)"}
    L = rep.lines
    points = []
    for p in cfg.ps:
        t = theta_hat(ball, p, cfg.samples, cfg.seed, cfg.workers)
        if cfg.probe_samples:
            pr = uniqueness_probe(ball, p, cfg.probe_samples, cfg.seed, workers=cfg.workers)
            t = ThetaPoint(t.p, t.theta, t.ci_lo, t.ci_hi, t.n_samples, t.hits, pr.mean)
        points.append(t)
    if cfg.pc:
        est = pc_estimate(ball, cfg.samples, cfg.seed, cfg.tau, workers=cfg.workers)
        rep.record("pc_estimate", "p_c", est.p_c, est.provenance)
        rep.record("pc_estimate", "ci_lo", est.ci[0], est.provenance)
        rep.record("pc_estimate", "ci_hi", est.ci[1], est.provenance)
        rep.stages["pc_estimate"]["method"] = est.method
        L.append(f"p_c estimate {est.p_c:.4f}  CI [{est.ci[0]:.4f}, {est.ci[1]:.4f}]  (tau = {cfg.tau})")
        known = {t.p for t in points}
        points += [t for t in est.evaluations if t.p not in known]
        probe_p = est.p_c
    else:
        probe_p = None
    points.sort(key=lambda t: t.p)
    rep.stages["theta_curve"] = [
        {"p": t.p, "theta": q(t.theta, Provenance.MONTE_CARLO), "ci": [t.ci_lo, t.ci_hi], "n": t.n_samples}
        for t in points
    ]
    for t in points:
        L.append(f"p = {t.p:.6f}  theta = {t.theta:.4f}  [{t.ci_lo:.4f}, {t.ci_hi:.4f}]")
    if probe_p is not None and cfg.probe_samples:
        pr = uniqueness_probe(ball, probe_p, cfg.probe_samples, cfg.seed, workers=cfg.workers)
        rep.stages["uniqueness_probe"] = {
            "p": probe_p,
            "histogram": {str(k): v for k, v in pr.histogram.items()},
            "mean": q(pr.mean, Provenance.MONTE_CARLO),
            "certified": False,
            "inner_radius": pr.inner_radius,
        }
        L.append(f"crossing clusters at p_c estimate: mean {pr.mean:.3f} (proxy only)")

    h, hprov = cfg.h, Provenance(cfg.h_provenance)
    if h is None:
        h, hprov = _exact_tree_h(ctx, ball.multiset), Provenance.EXACT
    if h is not None:
        b = bs_pc_bound(ball.multiset.size, h, hprov)
        rep.record("pc_bound", "pc_upper", b.value, b.provenance)
        rep.record("pc_bound", "h", h, hprov)
        L.append(f"p_c <= 1/(|S| h + 1) = {b.value:.6f}  (h = {h})")
    return rep, points


def theta_csv(points: list[ThetaPoint]) -> str:
    buf = io.StringIO()
    write_theta_csv(points, buf)
    return buf.getvalue()


def theta_svg(points: list[ThetaPoint], rules: dict[str, float] | None = None,
              width: int = 480, height: int = 320) -> str:
    """theta-hat polyline with its Wilson band; ``rules`` become horizontal lines."""
    m = 40
    def X(p):
        return m + p * (width - 2 * m)
    def Y(v):
        return height - m - v * (height - 2 * m)
    pts = sorted(points, key=lambda t: t.p)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="{m}" y="{m}" width="{width - 2 * m}" height="{height - 2 * m}" fill="none" stroke="#444"/>']
    if pts:
        band = [f"{X(t.p):.2f},{Y(t.ci_hi):.2f}" for t in pts]
        band += [f"{X(t.p):.2f},{Y(t.ci_lo):.2f}" for t in reversed(pts)]
        out.append(f'<polygon points="{" ".join(band)}" fill="#9cc3e6" fill-opacity="0.5" stroke="none"/>')
        line = " ".join(f"{X(t.p):.2f},{Y(t.theta):.2f}" for t in pts)
        out.append(f'<polyline points="{line}" fill="none" stroke="#1f4e79" stroke-width="1.5"/>')
    for label, v in sorted((rules or {}).items()):
        if 0.0 <= v <= 1.0:
            out.append(f'<line x1="{m}" x2="{width - m}" y1="{Y(v):.2f}" y2="{Y(v):.2f}" '
                       f'stroke="#b03030" stroke-dasharray="4 3"/>')
            out.append(f'<text x="{width - m + 2}" y="{Y(v) + 4:.2f}" font-size="10">{label}</text>')
    for v in (0.0, 0.5, 1.0):
        out.append(f'<text x="{m - 4}" y="{Y(v) + 4:.2f}" font-size="10" text-anchor="end">{v:g}</text>')
        out.append(f'<text x="{X(v):.2f}" y="{height - m + 14}" font-size="10" text-anchor="middle">{v:g}</text>')
    out.append(f'<text x="{width / 2}" y="{height - 6}" font-size="11" text-anchor="middle">p</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class WitnessConfig:
    paradoxical_f2: bool = False
    group: str | None = None
    iterate: str | None = None  # "box:L"
    m: int = 3
    start: str = "point"  # "point" or "box:W"


def _parse_box(spec: str) -> int:
    kind, _, arg = spec.partition(":")
    if kind != "box" or not arg.isdigit() or int(arg) < 1:
        raise ValueError(f"expected box:<side>, got {spec!r}")
    return int(arg)


def _start_witness(ctx: GroupContext, start: str) -> dx.DixmierWitness:
    S = ctx.standard_symmetric()
    if start == "point":
        pts = [ctx.identity_form]
    else:
        w = _parse_box(start)
        pts = [()]
        for _ in range(ctx.rank):
            pts = [p + (i,) for p in pts for i in range(w)]
    h = dx.FinsuppFunction.indicator(ctx, pts)
    return dx.DixmierWitness.from_pairs(ctx, [(h, g) for g in S.elements]).normalize()


def run_witness(cfg: WitnessConfig) -> RunReport:
    if cfg.paradoxical_f2:
        dec, w = dx.paradoxical_witness_f2()
        rep = RunReport("witness", w.ctx.spec(), w.S.spec(), None)
        checks = dec.check_partitions()
        rep.stages["paradoxical"] = {"checks": checks, "tarski_count": dec.tarski_count,
                                     "witness": dx.witness_to_json(w)}
        rep.record("paradoxical", "sup", w.sup, Provenance.EXACT)
        rep.record("paradoxical", "epsilon", w.epsilon, Provenance.EXACT)
        rep.record("paradoxical", "scaled_sup", dec.scaled_H().sup(), Provenance.EXACT)
        rep.record("paradoxical", "normalization", w.normalization, Provenance.EXACT)
        rep.lines += [f"{k}: {'pass' if v else 'FAIL'}" for k, v in checks.items()]
        rep.lines.append(f"sup H = {w.sup}  epsilon = {w.epsilon}  scaled sup = {dec.scaled_H().sup()}")
        ok = all(checks.values()) and w.sup < 0 and w.is_normalized
        rep.verdict = {"holds": ok, "certified": True}
        rep.exit_code = EXIT_CERTIFIED if ok else EXIT_NOT_CERTIFIED
        return rep
    if cfg.group is None or cfg.iterate is None:
        raise ValueError("witness needs --paradoxical-f2 or --group with --iterate")
    ctx = parse_group(cfg.group)
    side = _parse_box(cfg.iterate)
    w0 = _start_witness(ctx, cfg.start)
    chain = dx.dixmier_chain(w0, cfg.m, lambda w: dx.adapted_box(ctx, w.S, side))
    rep = RunReport("witness", ctx.spec(), w0.S.spec(), None)
    rep.record("start", "sup", w0.sup, Provenance.EXACT)
    rep.record("start", "normalization", w0.normalization, Provenance.EXACT)
    rows = []
    for j, (st, b, nm) in enumerate(zip(chain.steps, chain.chain_bounds, chain.norms), 1):
        rows.append({"m": j, "k": q(st.k, Provenance.EXACT), "norm": q(nm, Provenance.EXACT),
                     "bound": q(b, Provenance.EXACT), "sup": q(st.sup_after, Provenance.EXACT)})
        rep.lines.append(f"m = {j}: k = {st.k}  ||H_m|| = {nm}  <=  chain bound {b}")
    rep.stages["chain"] = rows
    final = chain.chain_bounds[-1] if chain.chain_bounds else w0.normalization
    dx.dichotomy_check(w0.epsilon, final)
    rep.lines.append(f"chain bound after {cfg.m} steps: {final} (verified)")
    rep.verdict = {"holds": True, "certified": True}
    rep.exit_code = EXIT_CERTIFIED
    return rep
