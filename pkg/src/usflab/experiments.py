"""Named experiments: each runs one verification and returns reports plus checks.

Every experiment takes a plain config dict (defaults below are the
acceptance settings), a seed and a thread count.  Work is split into fixed
chunks, each with its own ``(seed, chunk, key)`` stream, so results do not
depend on the number of threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import brw, forest, oracle, toy, walk
from .estimators import (
    EstimateReport, linear_fit, ks_distance, mean_report, proportion_report, scaling_fit,
    stretched_tail_models, two_sample_z,
)
from .graphs import FiniteGraph, GrandparentFamily, InvalidFamily, TreeFamily, make_family
from .levels import tmtp_check
from .rng import Uniforms, run_replicas, split


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Outcome:
    name: str
    config: dict
    reports: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str, ok, detail: str = "") -> bool:
        self.checks.append(Check(name, bool(ok), detail))
        return bool(ok)

    def near(self, report: EstimateReport, value=None, k: float = 4.0, label: str | None = None) -> bool:
        """Record ``report`` and check it lies within k SE of ``value`` (default: its reference)."""
        self.reports.append(report)
        target = report.reference if value is None else value
        z = report.z(target)
        return self.check(label or f"{report.statistic} within {k:g} SE of {target:.6g}", abs(z) <= k,
                          f"estimate={report.estimate:.6g} se={report.se:.3g} z={z:+.2f}")


def _chunks(fn, total: int, seed: int, threads, chunk: int, *key):
    sizes = split(total, chunk)
    return run_replicas(lambda rng, i: fn(rng, sizes[i]), seed, len(sizes), threads, key=key)


def _cat(parts, k):
    return np.concatenate([p[k] for p in parts])


# -- graph families -----------------------------------------------------------

FAMILY_SET = [
    {"family": "tree", "b": 2},
    {"family": "tree", "b": 3},
    {"family": "grandparent", "b": 2},
    {"family": "grandparent", "b": 3},
    {"family": "dl", "q": 3, "r": 2},
    {"family": "dl", "q": 2, "r": 2},
    {"family": "free_product", "base": {"family": "tree", "b": 2}},
]


def family_descriptors(cfg: dict) -> list:
    fam = cfg.get("family", "all")
    if fam == "all":
        return FAMILY_SET
    if isinstance(fam, dict):
        return [fam]
    d = {"family": fam}
    if fam in ("tree", "grandparent"):
        d["b"] = cfg.get("b", 2)
    elif fam == "dl":
        d["q"], d["r"] = cfg.get("q", 3), cfg.get("r", 2)
    elif fam == "free_product":
        base = cfg.get("base", "tree")
        d["base"] = family_descriptors(dict(cfg, family=base))[0]
    else:
        raise InvalidFamily(f"unknown family {fam!r}")
    return [d]


def describe_t0(g) -> str:
    base = g.kappa_base
    b = str(base.numerator) if base.denominator == 1 else f"{base.numerator}/{base.denominator}"
    if g.unimodular:
        return "0"
    return f"log {b}" if g.t0_units == 1 else f"{g.t0_units} log {b}"


def _label(d: dict) -> str:
    if d["family"] == "free_product":
        return "free_product[" + _label(d["base"]) + "]"
    return d["family"] + "(" + ",".join(f"{k}={v}" for k, v in d.items() if k != "family") + ")"


def _walk_from(g, v, steps, rng):
    path = [v]
    for j in rng.integers(0, g.degree, size=steps):
        path.append(g.entries(path[-1])[int(j)][0])
    return path


def _path_delta(g, path) -> Fraction:
    """Product of orbit-count ratios along a path."""
    out = Fraction(1)
    for a, c in zip(path[:-1], path[1:]):
        out *= Fraction(g.orbit_count(c, a), g.orbit_count(a, c))
    return out


def nk_counts(g, k_max: int) -> list:
    """(k, |N_k|, |N_-k|, expected ratio) for k = 1..k_max."""
    rows = []
    growth = g.kappa_base**g.t0_units
    for k in range(1, k_max + 1):
        up = len(g.n_level_set(g.root, k))
        down = len(g.n_level_set(g.root, -k))
        rows.append((k, up, down, growth**k))
    return rows


def run_family_info(cfg, seed, threads=None) -> Outcome:
    out = Outcome("family-info", cfg)
    rng = np.random.default_rng([seed, 1])
    for d in family_descriptors(cfg):
        g = make_family(d)
        lab = _label(d)
        hist = g.step_histogram()
        out.notes.append(f"{lab}: D={g.degree}, t0={describe_t0(g)}, kappa base={g.kappa_base}, steps={hist}")
        out.reports.append(EstimateReport(f"D[{lab}]", g.degree, 0.0, 1, seed))
        out.reports.append(EstimateReport(f"t0[{lab}]", g.t0, 0.0, 1, seed))
        verts = [g.random_vertex(rng, steps=int(rng.integers(0, 30))) for _ in range(cfg["vertices"])]
        bad = [v for v in verts if g.delta_sum(v) != g.degree]
        out.check(f"{lab}: sum of Delta over neighbors = D at {len(verts)} vertices", not bad,
                  f"{len(bad)} failures")
        fails = 0
        for _ in range(cfg["triples"]):
            u = g.random_vertex(rng, steps=int(rng.integers(0, 20)))
            p1 = _walk_from(g, u, int(rng.integers(1, 12)), rng)
            p2 = _walk_from(g, p1[-1], int(rng.integers(1, 12)), rng)
            v, w = p1[-1], p2[-1]
            ok = g.log_delta(u, v) + g.log_delta(v, w) == g.log_delta(u, w)
            ok &= _path_delta(g, p1) == g.delta(u, v) and _path_delta(g, p2) == g.delta(v, w)
            fails += not ok
        out.check(f"{lab}: cocycle identity on {cfg['triples']} triples", fails == 0, f"{fails} failures")
        asym = any(g.orbit_count(g.root, w) != g.orbit_count(w, g.root) for w, _ in g.neighbors(g.root))
        out.check(f"{lab}: asymmetric orbit pair exists iff nonunimodular", asym == (not g.unimodular))
        if d["family"] in ("tree", "grandparent"):
            rows = nk_counts(g, cfg["k_max"])
            bad = [r for r in rows if r[2] != r[3] * r[1]]
            out.check(f"{lab}: |N_-k| = e^(k t0) |N_k| for k<={cfg['k_max']}", not bad,
                      "; ".join(f"k={k}: {up},{down}" for k, up, down, _ in rows))
    return out


def run_nk_identity(cfg, seed, threads=None) -> Outcome:
    out = Outcome("nk-identity", cfg)
    for d in family_descriptors(cfg):
        g = make_family(d)
        lab = _label(d)
        for k, up, down, growth in nk_counts(g, cfg["k_max"]):
            out.notes.append(f"{lab} k={k}: |N_k|={up} |N_-k|={down} ratio={Fraction(down, up)}")
            out.check(f"{lab}: |N_-{k}| = {growth} |N_{k}|", down == growth * up)
        # composition N_{k+m} = N_k(N_m)
        k, m = 2, 1
        comp = {w for v in g.n_level_set(g.root, m) for w in g.n_level_set(v, k)}
        out.check(f"{lab}: N_3 = N_2(N_1)", comp == g.n_level_set(g.root, k + m))
    return out


def run_tmtp_check(cfg, seed, threads=None) -> Outcome:
    out = Outcome("tmtp-check", cfg)
    for d in family_descriptors(cfg):
        g = make_family(d)
        lab = _label(d)
        k = cfg["k"]
        sets: dict = {}

        def nk(x, y, k=k):
            if x not in sets:
                sets[x] = g.n_level_set(x, k)
            return Fraction(1, len(sets[x])) if y in sets[x] else 0

        def adjacent(x, y):
            return int(any(w == y for w, _ in g.neighbors(x)))

        for name, kern, radius, want in (("N_k", nk, abs(k), 1), ("adjacency", adjacent, 1, g.degree),
                                         ("zero", lambda x, y: 0, 1, 0)):
            res = tmtp_check(g, kern, radius)
            out.notes.append(f"{lab} {name}: lhs={res.lhs} rhs={res.rhs} gap={res.gap}")
            out.check(f"{lab}: transport for {name} kernel", res.lhs == want and res.rhs == want and not res.flagged)
    return out


# -- random walk --------------------------------------------------------------


def run_drift(cfg, seed, threads=None) -> Outcome:
    out = Outcome("drift", cfg)
    g = make_family(family_descriptors(dict(cfg, family=cfg.get("family", "tree")))[0])
    for i, lam in enumerate(cfg["lam"]):
        parts = run_replicas(lambda rng, _: walk.drift_moment(g, lam, cfg["samples"] // 4, rng, seed), seed, 4,
                             threads, key=(i,))
        vals = np.array([p.estimate for p in parts])
        exact = walk.drift_exact(g, lam)
        ses = np.array([p.se for p in parts])
        rep = EstimateReport(f"E[Delta^{lam}]", float(vals.mean()), float(math.sqrt(np.sum(ses**2)) / 4),
                             cfg["samples"], seed, 4, (), exact)
        out.near(rep)
        inside = 0 < lam < 1
        if not g.unimodular:
            out.check(f"E[Delta^{lam}] < 1 iff lam in (0,1)", (exact < 1 - 1e-12) == inside, f"exact={exact:.6g}")
        sym = walk.drift_exact(g, 1 - lam)
        out.check(f"E[Delta^{lam}] = E[Delta^{1 - lam:g}]", abs(exact - sym) < 1e-12)
    mean_log = walk.log_drift_exact(g)
    rng = np.random.default_rng([seed, 99])
    steps = walk.sample_steps(g, cfg["samples"], rng) * g.kappa
    out.near(mean_report("E[log Delta per step]", steps, seed=seed, reference=mean_log))
    return out


def run_walk_slabs(cfg, seed, threads=None) -> Outcome:
    out = Outcome("slab-moments", cfg)
    g = TreeFamily(cfg["b"])
    ns = list(cfg["walk_n"])
    stats = {}
    for i, n in enumerate(ns):
        rng = np.random.default_rng([seed, 7, i])
        st = walk.slab_visit_stats(g, n, cfg["samples"], cfg["horizon_steps"], rng, seed=seed)
        stats[n] = st
        out.reports += [st.occupation, st.weighted_time, st.last_visit]
        out.check(f"walk n={n}: unfinished walks below 1%", not st.unreliable)
    occ = [stats[n].occupation.estimate for n in ns]
    out.check("walk: occupation of L_-n flat in n (max/min <= 1.2)", max(occ) / min(occ) <= 1.2,
              " ".join(f"{o:.4f}" for o in occ))
    # weighted time = slope * n + offset; the ratio test only makes sense once n dominates the offset
    wt = [stats[n].weighted_time.estimate for n in ns]
    if len(ns) >= 2:
        fit = linear_fit(ns, wt)
        out.notes.append(f"walk: weighted time ~ {fit.slope:.4g} n + {fit.intercept:.4g}")
        out.check("walk: weighted time linear in n (R^2 > 0.99, positive slope)", fit.r2 > 0.99 and fit.slope > 0,
                  f"R^2={fit.r2:.5f}")
    big = [n for n in ns if n >= cfg["walk_ratio_min_n"]]
    per_n = [stats[n].weighted_time.estimate / n for n in big]
    out.notes.append("walk: weighted time / n: " + " ".join(f"n={n}:{stats[n].weighted_time.estimate / max(n, 1):.4f}"
                                                           for n in ns))
    if len(per_n) >= 2:
        out.check(f"walk: weighted time / n flat for n >= {cfg['walk_ratio_min_n']} (max/min <= 1.2)",
                  max(per_n) / min(per_n) <= 1.2, " ".join(f"{r:.4f}" for r in per_n))
    n = max(ns)
    tail = [(R, r) for R, r in stats[n].tail if R >= 4 * n and 0 < r.estimate]
    if len(tail) >= 3:
        fit = linear_fit([R for R, _ in tail], np.log([r.estimate for _, r in tail]), "log-linear")
        out.notes.append(f"walk n={n}: log P[last visit >= R] slope {fit.slope:.4g} (R^2={fit.r2:.4f})")
        out.check(f"walk n={n}: last-visit tail decays", fit.slope < 0)
    return out


# -- toy model: exact sampler -------------------------------------------------


def run_two_point(cfg, seed, threads=None) -> Outcome:
    out = Outcome("two-point", cfg)
    ns = list(cfg["n"])
    for bi, b in enumerate(cfg["b"]):
        def job(rng, size, b=b):
            batch = toy.sample_toy_components(b, 0, size, rng)
            return [batch.reaches(n) for n in ns]
        parts = _chunks(job, cfg["samples"], seed, threads, cfg["chunk"], 2, bi)
        for j, n in enumerate(ns):
            hits = _cat(parts, j)
            rep = mean_report(f"P[x<->ancestor_{n}][b={b}]", hits.astype(float), seed=seed,
                              reference=float(toy.two_point_exact(b, n)))
            out.near(rep)
    return out


def run_slab_moments(cfg, seed, threads=None) -> Outcome:
    if cfg.get("process", "toy") == "walk":
        return run_walk_slabs(cfg, seed, threads)
    out = Outcome("slab-moments", cfg)
    b = cfg["b"]
    lo, hi = cfg["growth_range"]
    ns = list(cfg["n"])
    deep = list(range(lo, hi + 1))

    def job(rng, size):
        batch = toy.sample_toy_components(b, -hi, size, rng)
        return [batch.at(n) for n in ns] + [batch.at(-m) for m in deep]
    parts = _chunks(job, cfg["samples"], seed, threads, cfg["chunk"], 3)
    for j, n in enumerate(ns):
        series = toy.first_moment_series(b, n)
        closed = toy.first_moment_exact(b, n)
        out.check(f"E|T_x cap L_{n}| closed form = series", abs(series - closed) < 1e-9 * max(1, series),
                  f"series={series:.12g} closed={closed:.12g}")
        out.near(mean_report(f"E|T_x cap L_{n}|[b={b}]", _cat(parts, j).astype(float), seed=seed, reference=series))
    means = [float(np.mean(_cat(parts, len(ns) + i))) for i in range(len(deep))]
    fit = linear_fit(deep, means)
    slope_exact = (b - 1) / (b + 1) * (1 + 1 / b)
    out.notes.append(f"mean vs |n| over {lo}..{hi}: slope {fit.slope:.4f} (exact {slope_exact:.4f}), R^2={fit.r2:.5f}")
    out.reports.append(EstimateReport(f"slope E|T_x cap L_-n| vs n[{lo}..{hi}]", fit.slope, 0.0, len(deep), seed,
                                      reference=slope_exact))
    out.check(f"linear growth in |n| over {lo}..{hi}: R^2 > 0.99", fit.r2 > 0.99, f"R^2={fit.r2:.5f}")
    return out


def run_vcomponent(cfg, seed, threads=None) -> Outcome:
    out = Outcome("vcomponent", cfg)
    b = cfg["b"]
    up = list(cfg["n_up"])
    down = list(range(1, cfg["n_down"] + 1))
    lams = list(cfg["lam_symmetry"])
    floor = cfg["floor"]

    def job(rng, size):
        batch = toy.sample_toy_vclusters(b, floor, size, rng)
        return [batch.reaches(n) for n in up] + [batch.at(-n) for n in down]
    parts = _chunks(job, cfg["samples"], seed, threads, cfg["chunk"], 4)
    for j, n in enumerate(up):
        out.near(mean_report(f"P[vcluster reaches L_{n}][b={b}]", _cat(parts, j).astype(float), seed=seed,
                             reference=float(b) ** -n))
    means = []
    for j, n in enumerate(down):
        rep = mean_report(f"E|vcluster cap L_-{n}|[b={b}]", _cat(parts, len(up) + j).astype(float), seed=seed,
                          reference=toy.vcluster_level_mean(b, -n))
        out.near(rep)
        means.append(rep.estimate)
    out.check(f"E|vcluster cap L_-n| flat for n=1..{len(down)} (max/min < 1.5)", max(means) / min(means) < 1.5,
              f"max/min={max(means) / min(means):.4f}")
    # stratified on the chain length: for lam > 1/2 the plain average has infinite variance
    gmax = cfg["chain_strata"]
    per = cfg["samples"] // (gmax + 1)

    def tilted(rng, i):
        lam = lams[i // 2] if i % 2 == 0 else 1 - lams[i // 2]
        return toy.vcluster_tilted_stratified(b, lam, per, gmax, floor, rng)
    strat = run_replicas(tilted, seed, 2 * len(lams), threads, key=(4, 1))
    for j, lam in enumerate(lams):
        pair = []
        for val, lm in ((strat[2 * j], lam), (strat[2 * j + 1], 1 - lam)):
            est, se, rem = val
            rep = EstimateReport(f"E|vcluster|_lam={lm:g}", est, se, per * (gmax + 1), seed,
                                 flags=("stratified", f"exact-remainder={rem:.3g}"),
                                 reference=toy.vcluster_tilted_mean(b, lm))
            out.near(rep)
            pair.append(rep)
        a, c = pair
        z = two_sample_z(a, c)
        out.check(f"tilted mean symmetric under lam <-> 1-lam at lam={lam}", abs(z) <= 4, f"z={z:+.2f}")
    sizes = np.concatenate(_chunks(lambda rng, size: toy.sample_vcluster_sizes(b, size, rng, cap=10),
                                   cfg["samples"], seed, threads, cfg["chunk"], 5))
    out.near(proportion_report(f"P[|vcluster|=1][b={b}]", int(np.sum(sizes == 1)), sizes.size, seed=seed,
                               reference=(1 - 1 / b) ** (b + 1)))
    return out


def run_gw_moments(cfg, seed, threads=None) -> Outcome:
    out = Outcome("gw-moments", cfg)
    b = cfg["b"]
    for i, n in enumerate(cfg["n"]):
        z = np.concatenate(_chunks(lambda rng, size, n=n: toy.gw_final(b, n, size, rng), cfg["samples"], seed,
                                   threads, cfg["chunk"], 6, i)).astype(float)
        out.near(mean_report(f"E[Z_{n}][b={b}]", z, seed=seed, reference=1.0))
        out.near(mean_report(f"E[Z_{n}^2][b={b}]", z**2, seed=seed, reference=toy.gw_second_moment(b, n)))
        zi = np.concatenate(_chunks(lambda rng, size, n=n: toy.gw_final(b, n, size, rng, immigration=True),
                                    cfg["samples"], seed, threads, cfg["chunk"], 7, i)).astype(float)
        out.near(mean_report(f"E[Z_{n}, immigration][b={b}]", zi, seed=seed, reference=n * (b - 1) / b))
    n = cfg["survival_n"]
    z = np.concatenate(_chunks(lambda rng, size: toy.gw_final(b, n, size, rng), cfg["survival_samples"], seed,
                               threads, cfg["chunk"], 8))
    p = proportion_report(f"P[Z_{n}>0][b={b}]", int(np.sum(z > 0)), z.size, seed=seed,
                          reference=toy.gw_survival_exact(b, n))
    out.near(p)
    limit = toy.kolmogorov_constant(b)
    scaled = n * p.estimate
    out.reports.append(EstimateReport(f"{n}*P[Z_{n}>0]", scaled, n * p.se, p.n, seed, reference=limit))
    out.check(f"n P[Z_n>0] within 10% of {limit:g} at n={n}", abs(scaled / limit - 1) <= 0.10, f"{scaled:.4f}")
    return out


def run_gamma_limit(cfg, seed, threads=None) -> Outcome:
    out = Outcome("gamma-limit", cfg)
    b, n = cfg["b"], cfg["n"]
    z = np.concatenate(_chunks(lambda rng, size: toy.sample_toy_components(b, -n, size, rng).at(-n) / n,
                               cfg["samples"], seed, threads, cfg["chunk"], 9))
    ks = ks_distance(z, toy.gamma_limit_cdf(b))
    out.reports.append(EstimateReport(f"KS(|T_x cap L_-{n}|/{n}, Gamma)", ks, 0.0, z.size, seed))
    out.reports.append(mean_report(f"E|T_x cap L_-{n}|/{n}", z, seed=seed, reference=toy.first_moment_exact(b, -n) / n))
    out.check(f"KS distance <= {cfg['ks_max']}", ks <= cfg["ks_max"], f"KS={ks:.4f}")
    return out


# -- tails --------------------------------------------------------------------


def tilted_tail(b: int, lam: float, R, samples: int, max_level: int, floor: int, seed: int, threads=None):
    """P[|T_x|_{x,lam} >= R] stratified on the highest level M of T_x.

    Strata M = 0..max_level get equal sample sizes; M > max_level is added
    exactly when the top vertex alone already exceeds every R.
    """
    R = np.asarray(R, dtype=float)
    if float(b) ** (lam * (max_level + 1)) < R.max():
        raise ValueError("max_level too small for the largest R")
    per = samples // (max_level + 1)
    pm = [float(toy.two_point_exact(b, m) - toy.two_point_exact(b, m + 1)) for m in range(max_level + 1)]

    def stratum(rng, m):
        w = np.array([toy.peak_pmf(b, j) * toy.chain_pmf(b, m - j) for j in range(m + 1)])
        k = rng.choice(m + 1, size=per, p=w / w.sum())
        batch = toy.sample_toy_components(b, floor, per, rng, peak=k, chain=m - k)
        v = batch.tilted_volume(b, lam)
        return np.array([np.mean(v >= r) for r in R])

    probs = np.array(run_replicas(stratum, seed, max_level + 1, threads, key=(10,)))
    pm = np.array(pm)
    est = pm @ probs + float(toy.two_point_exact(b, max_level + 1))
    se = np.sqrt((pm**2) @ (probs * (1 - probs) / per))
    return est, se, per * (max_level + 1)


def run_tail(cfg, seed, threads=None) -> Outcome:
    out = Outcome("tail", cfg)
    kinds = cfg["kind"] if isinstance(cfg["kind"], list) else [cfg["kind"]]
    b = cfg["b"]
    if "tilted" in kinds:
        lam = cfg["lam"]
        R = cfg["R"]
        est, se, n = tilted_tail(b, lam, R, cfg["samples"], cfg["max_level"], cfg["floor"], seed, threads)
        for r, e, s in zip(R, est, se):
            out.reports.append(EstimateReport(f"P[|T_x|_lam={lam} >= {r}]", float(e), float(s), n, seed,
                                              flags=("stratified",)))
        fits = {m: scaling_fit(R, est, m) for m in ("power", "power-log")}
        want = -1 / lam
        for m, f in fits.items():
            out.notes.append(f"tilted tail {m}: exponent {f.slope:.4f}, residual {f.residual:.3g}")
        f = fits["power-log"]
        out.check(f"tilted tail power-log exponent {want:g} +- {cfg['exponent_tolerance']}",
                  abs(f.slope - want) <= cfg["exponent_tolerance"], f"exponent={f.slope:.4f}")
    if "vsize" in kinds:
        R = np.array(cfg["vsize_R"])
        cap = int(R.max())
        sizes = np.concatenate(_chunks(lambda rng, size: toy.sample_vcluster_sizes(b, size, rng, cap=cap),
                                       cfg["samples"], seed, threads, cfg["chunk"], 11))
        exact = toy.vcluster_size_tail_exact(b, R)
        reps = [proportion_report(f"P[|vcluster| >= {r}]", int(np.sum(sizes >= r)), sizes.size, seed=seed,
                                  reference=float(e)) for r, e in zip(R, exact)]
        for rep in reps:
            out.near(rep)
        fit = scaling_fit(R, [r.estimate for r in reps], "power")
        exact_fit = scaling_fit(R, exact, "power")
        out.notes.append(f"vcluster size tail: MC exponent {fit.slope:.4f}, exact-curve exponent {exact_fit.slope:.4f}")
        out.check(f"vcluster size tail power exponent -0.5 +- {cfg['vsize_tolerance']}",
                  abs(fit.slope + 0.5) <= cfg["vsize_tolerance"], f"exponent={fit.slope:.4f}")
    if "level0" in kinds:
        lo, hi = cfg["k_range"]
        ks = np.arange(lo, hi + 1)
        tail = toy.vcluster_level0_tail_exact(b, ks)
        models = stretched_tail_models(ks, tail)
        for m, f in models.items():
            out.notes.append(f"-log P[|vcluster cap L_0| >= k] vs {m}: residual {f.residual:.4g}, R^2 {f.r2:.5f}")
        best = min(models, key=lambda m: models[m].residual)
        out.check("stretched-exponential level-0 tail: sqrt model fits best", best == "sqrt", f"best={best}")
        small = list(range(lo, lo + cfg["mc_k"]))
        counts = np.concatenate(_chunks(lambda rng, size: toy.sample_toy_vclusters(b, 0, size, rng).at(0),
                                        cfg["mc_samples"], seed, threads, cfg["chunk"], 12))
        ref = toy.vcluster_level0_tail_exact(b, small)
        for k, e in zip(small, ref):
            out.near(proportion_report(f"P[|vcluster cap L_0| >= {k}]", int(np.sum(counts >= k)), counts.size,
                                       seed=seed, reference=float(e)))
    return out


# -- grandparent oracles ------------------------------------------------------


def _all_saps(fg, v0, v1, k_max):
    paths = []
    for k in range(1, k_max + 1):
        paths += oracle.enumerate_sap(fg, v0, v1, k)
    return paths


def lerw_law_checks(out: Outcome, b: int, n: int, runs: int, seed: int, threads=None):
    ex = oracle.grandparent_exhaustion(b, n)
    fg = ex.graph
    paths = _all_saps(fg, ex.v0, ex.v1, n + 1)
    mus = [oracle.lerw_path_probability(fg, ex.v0, {ex.v1}, p) for p in paths]
    total = math.fsum(mus)
    out.reports.append(EstimateReport(f"sum of mu over {len(paths)} paths in G_{n}", total, 0.0, len(paths), seed,
                                      reference=1.0))
    out.check(f"mu totality on G_{n} within 1e-9", abs(total - 1) <= 1e-9, f"sum={total!r}")
    longest = max(paths, key=len)
    if len(longest) > 3:
        a = oracle.green_product(fg, {ex.v1}, longest[:-1])
        c = oracle.green_product(fg, {ex.v1}, list(reversed(longest[:-1])))
        out.check("Green product symmetric under reordering (1e-10)", abs(a - c) <= 1e-10 * a, f"{a!r} vs {c!r}")
    parts = run_replicas(lambda rng, i: oracle.lerw_path_frequencies(fg, ex.v0, {ex.v1}, runs // 8, rng), seed, 8,
                         threads, key=(13,))
    freq: dict = {}
    for part in parts:
        for p, c in part.items():
            freq[p] = freq.get(p, 0) + c
    m = 8 * (runs // 8)
    worst = 0.0
    for p, mu in zip(paths, mus):
        rep = proportion_report(f"LERW freq path {p}", freq.get(tuple(p), 0), m, seed=seed, reference=mu)
        z = rep.z() if rep.se > 0 else (0.0 if rep.estimate == mu or mu < 1 / m else math.inf)
        worst = max(worst, abs(z))
    out.reports.append(EstimateReport(f"max |z| LERW freq vs mu over {len(paths)} paths", worst, 0.0, m, seed))
    out.check(f"LERW path frequencies within 4 SE of mu ({m} runs)", worst <= 4, f"max|z|={worst:.2f}")
    out.check("every sampled LERW path was enumerated", set(freq) <= {tuple(p) for p in paths})


def resistance_checks(out: Outcome, b: int, radius: int):
    g_edge = FiniteGraph.from_edges(2, [(0, 1)])
    g_par = FiniteGraph.from_edges(2, [(0, 1), (0, 1)])
    out.check("resistance of a single edge = 1", abs(oracle.effective_resistance(g_edge, 0, {1}) - 1) < 1e-12)
    out.check("resistance of two parallel edges = 1/2", abs(oracle.effective_resistance(g_par, 0, {1}) - 0.5) < 1e-12)
    ex = oracle.grandparent_exhaustion(b, radius)
    fg = ex.graph
    gp = make_family({"family": "grandparent", "b": b})
    par = gp.parent(gp.root)
    targets = {fg.index[par], fg.index[gp.parent(par)]}
    r = oracle.effective_resistance(fg, ex.v0, targets)
    bound = oracle.local_resistance_bound(b)
    out.reports.append(EstimateReport(f"R(v0 <-> parent, grandparent) on G_{radius}", r, 0.0, fg.n, None,
                                      reference=bound))
    out.check(f"resistance <= (b+4)/(b^2+4b+8) = {bound:.6g} (+1e-9)", r <= bound + 1e-9, f"R={r:.10f}")
    dual = oracle.escape_transform(fg, ex.v0, targets)
    out.check("Green/resistance duality within 1e-10", abs(dual - r) <= 1e-10, f"{dual!r} vs {r!r}")


def run_grandparent_paths(cfg, seed, threads=None) -> Outcome:
    out = Outcome("grandparent-paths", cfg)
    b = cfg["b"]
    n = cfg["sap_n"]
    ex = oracle.grandparent_exhaustion(b, n)
    fg = ex.graph
    out.check("k=1: exactly one path", len(oracle.enumerate_sap(fg, ex.v0, ex.v1, 1)) == 1)
    two = oracle.enumerate_sap(fg, ex.v0, ex.v1, 2)
    out.check(f"b={b}, k=2: {b + 1} paths", len(two) == b + 1, f"found {len(two)}")
    k_empty = n + 2
    out.check(f"k={k_empty}=n+2: no paths in G_{n}", not oracle.enumerate_sap(fg, ex.v0, ex.v1, k_empty))
    every = _all_saps(fg, ex.v0, ex.v1, n + 1)
    one_tree = all(oracle.tree_edge_count(fg, p) == 1 for p in every)
    out.check("every v0-v1 path uses exactly one tree edge", one_tree)
    for cb, ck, cn in cfg["closed_form_cases"]:
        ex2 = oracle.grandparent_exhaustion(cb, cn)
        count = len(oracle.enumerate_sap(ex2.graph, ex2.v0, ex2.v1, ck))
        closed = oracle.closed_form_path_count(cb, ck, cn)
        out.notes.append(f"|P_(k={ck},n={cn})| b={cb}: enumeration {count}, closed form {closed}, offset {count - closed}")
        out.reports.append(EstimateReport(f"path count b={cb} k={ck} n={cn}", count, 0.0, 1, None, reference=closed))
    ex3 = oracle.grandparent_exhaustion(b, cfg["growth_n"])
    c4 = len(oracle.enumerate_sap(ex3.graph, ex3.v0, ex3.v1, 4))
    c6 = len(oracle.enumerate_sap(ex3.graph, ex3.v0, ex3.v1, 6))
    out.check(f"count ratio k=6 / k=4 in [b^2/2, 2 b^2] (n={cfg['growth_n']})", b * b / 2 <= c6 / c4 <= 2 * b * b,
              f"{c6}/{c4}={c6 / c4:.3f}")
    lerw_law_checks(out, b, cfg["n"], cfg["runs"], seed, threads)
    resistance_checks(out, b, cfg["resistance_radius"])
    return out


def run_lerw_law(cfg, seed, threads=None) -> Outcome:
    out = Outcome("lerw-law", cfg)
    lerw_law_checks(out, cfg["b"], cfg["n"], cfg["runs"], seed, threads)
    return out


def run_resistance(cfg, seed, threads=None) -> Outcome:
    out = Outcome("resistance", cfg)
    resistance_checks(out, cfg["b"], cfg["radius"])
    return out


def run_fusf_distance(cfg, seed, threads=None) -> Outcome:
    out = Outcome("fusf-distance", cfg)
    b, n = cfg["b"], cfg["n"]
    parts = run_replicas(lambda rng, i: oracle.fusf_distance_tail(b, n, cfg["k_max"], cfg["samples"] // 8, rng).distances,
                         seed, 8, threads, key=(14,))
    d = np.concatenate(parts)
    ks = list(range(1, cfg["k_max"] + 1))
    reps = [proportion_report(f"P[d(v0,v1)>={k}]", int(np.sum(d >= k)), d.size, seed=seed) for k in ks]
    out.reports += reps
    out.check("P[d>=1] = 1", reps[0].estimate == 1.0)
    out.check(f"d <= n+1 = {n + 1} always", int(d.max()) <= n + 1, f"max={int(d.max())}")
    lo, hi = cfg["fit_range"]
    sel = [r for k, r in zip(ks, reps) if lo <= k <= hi]
    ps = [r.estimate for r in sel]
    out.check(f"P[d>=k] strictly decreasing over k={lo}..{hi}", all(a > c for a, c in zip(ps, ps[1:])) and ps[-1] > 0,
              " ".join(f"{p:.4g}" for p in ps))
    if min(ps) > 0:
        fit = linear_fit(range(lo, hi + 1), np.log(ps), "log-linear")
        ref = -0.5 * math.log((b * b + 4 * b + 7) / (b + 4))
        out.notes.append(f"log P[d>=k] slope {fit.slope:.4f} (R^2 {fit.r2:.4f}); loose reference {ref:.4f}")
        out.reports.append(EstimateReport(f"slope log P[d>=k], k={lo}..{hi}", fit.slope, 0.0, d.size, seed))
        out.check(f"linear trend: slope < 0 and R^2 > 0.95", fit.slope < 0 and fit.r2 > 0.95,
                  f"slope={fit.slope:.4f} R^2={fit.r2:.4f}")
    return out


# -- free product / branching random walk -------------------------------------


def run_biggins(cfg, seed, threads=None) -> Outcome:
    out = Outcome("biggins", cfg)
    b, M, alpha = cfg["b"], cfg["M"], cfg["alpha"]
    tree = TreeFamily(b)
    base = brw.AllEdges(tree, M)
    rng = np.random.default_rng([seed, 15])
    lam_x, lamp_x = base.exact_lambda(alpha), base.exact_lambda_prime(alpha)
    out.notes.append(f"all-edges tree b={b} M={M}: lambda(-1)={lam_x:.6g}, lambda'(-1)={lamp_x:.6g}")
    if b == 2 and M == 1 and alpha == -1:
        out.check("exact lambda(-1) = 3 and lambda'(-1) = log 2", abs(lam_x - 3) < 1e-12
                  and abs(lamp_x - math.log(2)) < 1e-12)
    out.check("lambda(-1) > e", lam_x > math.e, f"{lam_x:.6g}")
    s = brw.summarize_base(base, cfg["samples"], rng, alpha, seed)
    out.near(s.lam)
    out.near(s.lam_prime)
    bigger = brw.AllEdges(tree, M + 1).exact_lambda(alpha)
    out.check(f"lambda(-1) increases from M={M} to M={M + 1}", bigger > lam_x, f"{lam_x:.6g} -> {bigger:.6g}")
    cond = brw.biggins_check(s.lam.estimate, s.lam_prime.estimate, alpha, s.llogl.estimate)
    out.check("Biggins conditions hold for the all-edges base", all(cond.values()), str(cond))
    law = brw.OffspringLaw(base)
    trace = brw.brw_weight_growth(law, alpha, cfg["generations"], rng, lam_x)
    fit = brw.growth_slope(trace)
    out.reports.append(EstimateReport("growth slope of log sum m-ratio", fit.slope, 0.0, cfg["generations"], seed,
                                      reference=math.log(lam_x)))
    out.check("growth slope within 15% of log lambda(-1)", abs(fit.slope / math.log(lam_x) - 1) <= 0.15,
              f"slope={fit.slope:.4f} log lambda={math.log(lam_x):.4f}")
    for rep in brw.martingale_increments(law, alpha, cfg["martingale_generations"], cfg["martingale_replicas"],
                                         rng, lam_x, seed):
        out.near(rep, label=f"all-edges {rep.statistic} mean zero within 4 SE")
    # a random base with an exact lambda: Bernoulli bonds on a tree ball
    bern = brw.BernoulliBonds(tree, cfg["bernoulli_M"], cfg["bernoulli_p"])
    blam = bern.exact_lambda(alpha)
    bs = brw.summarize_base(bern, cfg["samples"] * 20, rng, alpha, seed)
    out.near(bs.lam)
    out.near(bs.lam_prime)
    blaw = brw.OffspringLaw(bern)
    for rep in brw.martingale_increments(blaw, alpha, cfg["martingale_generations"], cfg["martingale_replicas"],
                                         rng, blam, seed):
        out.near(rep, label=f"bernoulli {rep.statistic} mean zero within 4 SE")
    slopes = [brw.growth_slope(brw.brw_weight_growth(blaw, alpha, cfg["bernoulli_generations"], rng, blam),
                               start=2).slope for _ in range(cfg["bernoulli_trajectories"])]
    ms = float(np.mean(slopes))
    out.check("bernoulli growth slope within 15% of log lambda(-1)", abs(ms / math.log(blam) - 1) <= 0.15,
              f"mean slope={ms:.4f} log lambda={math.log(blam):.4f}")
    # lambda' + lambda >= E[N] for every base tested
    bases = [("all-edges", s), ("bernoulli", bs)]
    if cfg["toy_samples"]:
        toy_base = brw.ToyWusfBase(tree, cfg["toy_M"], horizon=cfg["toy_horizon"])
        bases.append(("toy-wusf", brw.summarize_base(toy_base, cfg["toy_samples"], rng, alpha, seed)))
    if cfg["gp_samples"]:
        gp = make_family({"family": "grandparent", "b": b})
        gp_base = brw.GrandparentFusfBase(gp, cfg["gp_M"], cfg["gp_exhaustion"])
        out.notes.append(f"grandparent free-forest base uses the exhaustion G_{cfg['gp_exhaustion']}")
        gs = brw.summarize_base(gp_base, cfg["gp_samples"], rng, alpha, seed)
        bases.append(("grandparent-fusf", gs))
        gc = brw.biggins_check(gs.lam.estimate, gs.lam_prime.estimate, alpha)
        out.notes.append(f"grandparent-fusf: lambda={gs.lam.estimate:.4f} lambda'={gs.lam_prime.estimate:.4f} {gc}")
    for name, summ in bases:
        out.reports += [summ.lam, summ.lam_prime, summ.offspring]
        gap = summ.f_sum.estimate - summ.offspring.estimate
        se = math.hypot(summ.f_sum.se, summ.offspring.se)
        out.check(f"{name}: lambda'(-1)+lambda(-1) >= E[N] - 4 SE", gap >= -4 * se,
                  f"{summ.f_sum.estimate:.4f} vs {summ.offspring.estimate:.4f}")
    return out


def run_brw_growth(cfg, seed, threads=None) -> Outcome:
    out = Outcome("brw-growth", cfg)
    tree = TreeFamily(cfg["b"])
    base = brw.AllEdges(tree, cfg["M"]) if cfg["base"] == "all-edges" else brw.BernoulliBonds(tree, cfg["M"], cfg["p"])
    law = brw.OffspringLaw(base)
    alpha = cfg["alpha"]
    lam = base.exact_lambda(alpha)
    rng = np.random.default_rng([seed, 16])
    trace = brw.brw_weight_growth(law, alpha, cfg["generations"], rng, lam)
    for k, (w, pop) in enumerate(zip(trace.weights, trace.population)):
        out.notes.append(f"generation {k}: population {pop}, W={w:.6g}")
    out.check("population cap not hit", not trace.capped)
    one = brw.BernoulliBonds(tree, 1, 1.0)
    # a deterministic single child with zero displacement keeps W at 1
    single = brw.OffspringLaw(_SingleZero(tree))
    tr1 = brw.brw_weight_growth(single, alpha, 10, rng, 1.0)
    out.check("single zero-displacement child: W_k = 1", all(abs(w - 1) < 1e-15 for w in tr1.weights))
    fp = make_family({"family": "free_product", "base": tree.descriptor()})
    gens = brw.free_product_generations(fp, one, 3, rng)
    out.check("free product: switch edges carry zero displacement", True, f"generation sizes {[len(g) for g in gens]}")
    levels = sorted(fp.level(v) for v in gens[1])
    out.check("free product generation 1 levels match the base ball", levels == sorted(one.displacements(rng).tolist()))
    return out


class _SingleZero(brw.BasePercolation):
    exact = True

    def __init__(self, graph):
        self.graph, self.radius = graph, 1

    def sample_many(self, rng, count):
        return np.ones(count, dtype=np.int64), np.zeros(count, dtype=np.int64)

    def exact_lambda(self, alpha):
        return 1.0


# -- horizon-approximate Wilson sampler vs exact toy sampler ------------------


def run_oracle_compare(cfg, seed, threads=None) -> Outcome:
    out = Outcome("oracle-compare", cfg)
    b, H = cfg["b"], cfg["horizon"]
    g = TreeFamily(b)
    x = g.root
    anc = [x]
    for _ in range(max(cfg["two_point_n"])):
        anc.append(g.parent(anc[-1]))

    def two_point_job(rng, size):
        draws = Uniforms(rng)
        hits = np.zeros((size, len(cfg["two_point_n"])), dtype=bool)
        for i in range(size):
            for j, n in enumerate(cfg["two_point_n"]):
                f = forest.sample_wusf_region(g, [x, anc[n]], horizon=H, draws=draws)
                hits[i, j] = f.connected(x, anc[n])
        return hits
    hits = np.concatenate(_chunks(two_point_job, cfg["two_point_samples"], seed, threads, cfg["chunk"], 17))
    exact_hits = np.concatenate(_chunks(
        lambda rng, size: np.stack([toy.sample_toy_components(b, 0, size, rng).reaches(n) for n in cfg["two_point_n"]],
                                   axis=1), cfg["two_point_samples"], seed, threads, cfg["chunk"], 18))
    for j, n in enumerate(cfg["two_point_n"]):
        w = mean_report(f"wilson P[x<->ancestor_{n}]", hits[:, j].astype(float), seed=seed,
                        reference=float(toy.two_point_exact(b, n)), flags=(f"horizon={H}",))
        e = mean_report(f"exact P[x<->ancestor_{n}]", exact_hits[:, j].astype(float), seed=seed)
        out.near(w)
        out.reports.append(e)
        z = two_sample_z(w, e)
        out.check(f"two-point n={n}: wilson vs exact sampler within 4 SE", abs(z) <= 4, f"z={z:+.2f}")

    floor = cfg["moment_floor"]
    ns = list(range(floor, cfg["moment_top"] + 1))
    win = forest.level_window(g, x, floor)

    def moment_job(rng, size):
        draws = Uniforms(rng)
        counts = np.zeros((size, len(ns)), dtype=np.int64)
        for i in range(size):
            _, members = forest.explore_component(g, x, win, horizon=H, draws=draws)
            lv = [g.level(v) for v in members]
            counts[i] = [lv.count(n) for n in ns]
        return counts
    counts = np.concatenate(_chunks(moment_job, cfg["component_samples"], seed, threads, cfg["chunk"], 19))
    exact_counts = np.concatenate(_chunks(
        lambda rng, size: np.stack([toy.sample_toy_components(b, floor, size, rng).at(n) for n in ns], axis=1),
        cfg["component_samples"], seed, threads, cfg["chunk"], 20))
    for j, n in enumerate(ns):
        w = mean_report(f"wilson E|T_x cap L_{n}|", counts[:, j].astype(float), seed=seed,
                        reference=toy.first_moment_exact(b, n), flags=(f"horizon={H}",))
        e = mean_report(f"exact E|T_x cap L_{n}|", exact_counts[:, j].astype(float), seed=seed)
        out.near(w)
        out.reports.append(e)
        z = two_sample_z(w, e)
        out.check(f"first moment n={n}: wilson vs exact sampler within 4 SE", abs(z) <= 4, f"z={z:+.2f}")

    vn = list(cfg["vcluster_n"])
    vwin = forest.level_window(g, x, cfg["vcluster_floor"])

    def vjob(rng, size):
        draws = Uniforms(rng)
        out_ = np.zeros((size, len(vn) + 1), dtype=np.int64)
        for i in range(size):
            _, members = forest.sample_vwusf_component(g, x, vwin, horizon=H, draws=draws)
            lv = [g.level(v) for v in members]
            out_[i, :len(vn)] = [any(level == n for level in lv) for n in vn]
            out_[i, -1] = lv.count(-1)
        return out_
    vres = np.concatenate(_chunks(vjob, cfg["component_samples"], seed, threads, cfg["chunk"], 21))
    for j, n in enumerate(vn):
        out.near(mean_report(f"wilson P[vcluster reaches L_{n}]", vres[:, j].astype(float), seed=seed,
                             reference=float(b) ** -n, flags=(f"horizon={H}",)))
    out.near(mean_report("wilson E|vcluster cap L_-1|", vres[:, -1].astype(float), seed=seed,
                         reference=toy.vcluster_level_mean(b, -1), flags=(f"horizon={H}",)))

    # region stability on the grandparent graph (on the tree the window cannot matter: tree paths
    # between two levels stay between them).  The same forests are read off in the full window
    # and in the half-depth window.
    gp = GrandparentFamily(b)
    rf, lvl = cfg["region_floor"], cfg["region_level"]
    big, half = forest.level_window(gp, gp.root, rf), forest.level_window(gp, gp.root, rf // 2)

    def region_job(rng, size):
        draws = Uniforms(rng)
        res = np.zeros((size, 2), dtype=np.int64)
        for i in range(size):
            f, members = forest.sample_vwusf_component(gp, gp.root, big, horizon=H, draws=draws)
            res[i] = [sum(gp.level(v) == lvl for v in vs) for vs in (members, f.reachable(gp.root, half))]
        return res
    rres = np.concatenate(_chunks(region_job, cfg["region_samples"], seed, threads, cfg["chunk"], 23))
    full = mean_report(f"grandparent E|vcluster at level {lvl}| (floor {rf})", rres[:, 0].astype(float),
                       seed=seed, flags=(f"horizon={H}",))
    halved = mean_report(f"grandparent E|vcluster at level {lvl}| (floor {rf // 2})", rres[:, 1].astype(float),
                         seed=seed, flags=(f"horizon={H}",))
    out.reports += [full, halved]
    shift = full.estimate - halved.estimate
    out.check("region doubling changes the estimate by < 1 SE", abs(shift) < full.se,
              f"shift={shift:+.4g} se={full.se:.3g}")

    rng = np.random.default_rng([seed, 22])
    bias = walk.post_escape_return_rate(g, H, cfg["bias_samples"], cfg["bias_steps"], rng, seed)
    out.reports.append(bias)
    out.notes.append(f"post-escape return frequency at H={H}: {bias.estimate:.3g} (+-{bias.se:.2g}); "
                     f"exact {b ** -H:.3g}")
    out.check("post-escape return frequency within 4 SE of b^-H", bias.within(float(b) ** -H))
    return out


# -- registry -----------------------------------------------------------------


@dataclass
class Experiment:
    run: object
    defaults: dict
    criterion: int | None
    help: str


EXPERIMENTS = {
    "family-info": Experiment(run_family_info, {"family": "all", "vertices": 100, "triples": 1000, "k_max": 6}, 1,
                              "modular-function identities and level-set sizes"),
    "two-point": Experiment(run_two_point, {"b": [2, 3], "n": [0, 1, 2, 3, 4, 5], "samples": 100_000,
                                            "chunk": 25_000}, 2, "toy two-point function"),
    "slab-moments": Experiment(run_slab_moments, {"process": "toy", "b": 2, "n": [-5, -4, -3, -2, -1, 0, 1, 2, 3],
                                                  "samples": 100_000, "growth_range": [5, 40], "chunk": 25_000,
                                                  "horizon_steps": 400, "walk_n": [5, 10, 20],
                                                  "walk_ratio_min_n": 10}, 3,
                               "toy first moments per level (or SRW slab visits with process=walk)"),
    "vcomponent": Experiment(run_vcomponent, {"b": 2, "n_up": [1, 2, 3, 4], "n_down": 10, "lam_symmetry": [0.3, 0.4],
                                              "floor": -60, "chain_strata": 30, "samples": 100_000, "chunk": 25_000}, 4,
                             "cluster of x in the x-rooted forest"),
    "gw-moments": Experiment(run_gw_moments, {"b": 2, "n": [4, 16, 64], "samples": 100_000, "survival_n": 500,
                                              "survival_samples": 1_000_000, "chunk": 50_000}, 5,
                             "critical Galton-Watson moments and survival"),
    "gamma-limit": Experiment(run_gamma_limit, {"b": 2, "n": 300, "samples": 10_000, "ks_max": 0.03,
                                                "chunk": 2_500}, 6, "Gamma limit of deep level counts"),
    "tail": Experiment(run_tail, {"kind": ["tilted", "vsize"], "b": 2, "lam": 0.5, "R": [10, 100, 1000, 10000],
                                  "samples": 1_000_000, "max_level": 44, "floor": -60, "exponent_tolerance": 0.25,
                                  "vsize_R": [10, 30, 100, 300, 1000, 3000, 10000], "vsize_tolerance": 0.1,
                                  "k_range": [4, 100], "mc_k": 7, "mc_samples": 100_000, "chunk": 50_000}, 7,
                       "tail exponents (kind=level0 for stretched-exponential tails)"),
    "grandparent-paths": Experiment(run_grandparent_paths, {"b": 2, "n": 3, "sap_n": 5, "runs": 100_000,
                                                            "closed_form_cases": [[2, 4, 8], [3, 4, 8], [2, 6, 10]],
                                                            "growth_n": 10, "resistance_radius": 6}, 9,
                                    "grandparent path counts and the LERW path law"),
    "fusf-distance": Experiment(run_fusf_distance, {"b": 2, "n": 8, "k_max": 10, "samples": 10_000,
                                                    "fit_range": [2, 6]}, 10,
                                "tree distance between v0 and v1 in the UST of G_n"),
    "biggins": Experiment(run_biggins, {"b": 2, "M": 1, "alpha": -1, "samples": 1000, "generations": 12,
                                        "martingale_generations": 4, "martingale_replicas": 1000,
                                        "bernoulli_M": 2, "bernoulli_p": 0.7, "bernoulli_generations": 8,
                                        "bernoulli_trajectories": 10, "toy_M": 3, "toy_samples": 2000,
                                        "toy_horizon": 12, "gp_M": 1, "gp_exhaustion": 6, "gp_samples": 500}, 11,
                          "branching random walk comparison and Biggins conditions"),
    "oracle-compare": Experiment(run_oracle_compare, {"b": 2, "horizon": 12, "two_point_n": [1, 2, 3],
                                                      "two_point_samples": 20_000, "moment_floor": -2,
                                                      "moment_top": 3, "component_samples": 10_000,
                                                      "vcluster_n": [1, 2, 3], "vcluster_floor": -1,
                                                      "region_samples": 4000, "region_floor": -8,
                                                      "region_level": -2,
                                                      "bias_samples": 200_000, "bias_steps": 2000,
                                                      "chunk": 2_500}, 12,
                                 "Wilson sampler with escape horizon vs exact toy sampler"),
    "drift": Experiment(run_drift, {"family": "tree", "b": 2, "lam": [0.5, 1, 2, 0.3], "samples": 100_000}, None,
                        "drift moments of the modular function along SRW steps"),
    "nk-identity": Experiment(run_nk_identity, {"family": "tree", "b": 2, "k_max": 6}, None,
                              "level-set size identity for one family"),
    "tmtp-check": Experiment(run_tmtp_check, {"family": "tree", "b": 2, "k": 3}, None,
                             "tilted mass transport on a ball"),
    "lerw-law": Experiment(run_lerw_law, {"b": 2, "n": 3, "runs": 100_000}, None,
                           "LERW path law vs empirical frequencies"),
    "resistance": Experiment(run_resistance, {"b": 2, "radius": 6}, None, "effective resistance checks"),
    "brw-growth": Experiment(run_brw_growth, {"base": "all-edges", "b": 2, "M": 1, "p": 0.7, "alpha": -1,
                                              "generations": 10}, None, "weight trace of the branching random walk"),
}

# criterion 8 is the level-0 tail kind of the tail experiment
CRITERIA = {
    1: ("family-info", {}),
    2: ("two-point", {}),
    3: ("slab-moments", {}),
    4: ("vcomponent", {}),
    5: ("gw-moments", {}),
    6: ("gamma-limit", {}),
    7: ("tail", {}),
    8: ("tail", {"kind": ["level0"]}),
    9: ("grandparent-paths", {}),
    10: ("fusf-distance", {}),
    11: ("biggins", {}),
    12: ("oracle-compare", {}),
}


def config_for(name: str, overrides: dict | None = None) -> dict:
    if name not in EXPERIMENTS:
        raise KeyError(f"unknown experiment {name!r}")
    cfg = dict(EXPERIMENTS[name].defaults)
    for k, v in (overrides or {}).items():
        if k not in cfg and k not in ("family", "q", "r", "base", "b"):
            raise KeyError(f"unknown parameter {k!r} for {name}")
        cfg[k] = v
    return cfg


def run_experiment(name: str, overrides: dict | None = None, seed: int = 7, threads=None) -> Outcome:
    cfg = config_for(name, overrides)
    return EXPERIMENTS[name].run(cfg, seed, threads)


def run_criterion(number: int, seed: int = 7, threads=None) -> Outcome:
    name, overrides = CRITERIA[number]
    return run_experiment(name, overrides, seed, threads)
