"""Simple random walk engine with loop erasure and level-process statistics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .estimators import EstimateReport, mean_report
from .graphs import GraphHandle
from .rng import Uniforms

DEFAULT_HORIZON = 25
DEFAULT_CAP = 10**7


@dataclass
class WalkPath:
    vertices: list
    levels: list = field(default_factory=list)  # cumulative log Delta from the start
    cap_hit: bool = False

    @property
    def steps(self) -> int:
        return len(self.vertices) - 1

    def __len__(self):
        return len(self.vertices)


def walk(g: GraphHandle, start, stop, cap: int = DEFAULT_CAP, rng=None, draws=None) -> WalkPath:
    """Run SRW from ``start`` until ``stop(vertex, level, time)`` is true or ``cap`` steps."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    draws = draws or Uniforms(rng)
    v, lvl = start, 0
    verts, levels = [v], [0]
    d = g.degree
    for t in range(cap + 1):
        if stop(v, lvl, t):
            return WalkPath(verts, levels)
        if t == cap:
            break
        w, s, _ = g.entries(v)[int(draws() * d)]
        v, lvl = w, lvl + s
        verts.append(v)
        levels.append(lvl)
    return WalkPath(verts, levels, cap_hit=True)


def loop_erase(path):
    """Chronological loop erasure.  Accepts a WalkPath or any vertex sequence."""
    verts = path.vertices if isinstance(path, WalkPath) else list(path)
    out: list = []
    pos: dict = {}
    keep_levels = isinstance(path, WalkPath) and path.levels
    lv: list = []
    for i, v in enumerate(verts):
        j = pos.get(v)
        if j is not None:
            for u in out[j + 1:]:
                del pos[u]
            del out[j + 1:]
            del lv[j + 1:]
            continue
        pos[v] = len(out)
        out.append(v)
        if keep_levels:
            lv.append(path.levels[i])
    if isinstance(path, WalkPath):
        return WalkPath(out, lv, path.cap_hit)
    return out


def escaped(level: int, forest_min_level: int, horizon: int, t0_units: int = 1) -> bool:
    """True once the walker is ``horizon`` slabs below the lowest forest level."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    return level <= forest_min_level - horizon * t0_units


def drift_exact(g: GraphHandle, lam: float) -> float:
    base = float(g.kappa_base)
    return sum(c * base ** (lam * s) for s, c in g.step_histogram().items()) / g.degree


def log_drift_exact(g: GraphHandle) -> float:
    """Mean log Delta of one step, in natural units."""
    return sum(c * s for s, c in g.step_histogram().items()) * g.kappa / g.degree


def sample_steps(g: GraphHandle, shape, rng) -> np.ndarray:
    """i.i.d. level increments of SRW (kappa units), drawn from the neighbor histogram."""
    hist = g.step_histogram()
    steps = np.array(list(hist), dtype=np.int64)
    p = np.array(list(hist.values()), dtype=float) / g.degree
    return steps[rng.choice(len(steps), size=shape, p=p)]


def drift_moment(g: GraphHandle, lam: float, n_samples: int, rng, seed=None) -> EstimateReport:
    """Monte Carlo estimate of E[Delta(X0, X1)**lam] along real graph steps."""
    draws = Uniforms(rng)
    v = g.random_vertex(rng, steps=5)
    base = float(g.kappa_base)
    vals = np.empty(n_samples)
    d = g.degree
    for i in range(n_samples):
        _, s, _ = g.entries(v)[int(draws() * d)]
        vals[i] = base ** (lam * s)
    return mean_report(f"drift_moment[lam={lam}]", vals, seed=seed, reference=drift_exact(g, lam))


@dataclass
class SlabVisits:
    occupation: EstimateReport
    weighted_time: EstimateReport
    last_visit: EstimateReport
    tail: list  # (R, EstimateReport) pairs
    unreliable: bool


def slab_visit_stats(g: GraphHandle, n: int, n_samples: int, horizon_steps: int, rng,
                     escape_slabs: int = DEFAULT_HORIZON, tail_grid=None, seed=None,
                     chunk: int = 4096) -> SlabVisits:
    """Occupation and last-visit statistics of the slab L_{-n} for SRW from the base.

    Only the level process matters for slab membership, and it is a random
    walk with i.i.d. increments, so walks are simulated on levels directly.
    A fresh offset U is drawn for every walk.  A walk counts as finished once
    it is ``escape_slabs`` slabs below L_{-n}; unfinished walks are reported.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    t = g.t0_units
    occ, wsum, last = [], [], []
    unfinished = 0
    for size in [chunk] * (n_samples // chunk) + ([n_samples % chunk] if n_samples % chunk else []):
        steps = sample_steps(g, (size, horizon_steps), rng)
        lv = np.concatenate([np.zeros((size, 1), dtype=np.int64), np.cumsum(steps, axis=1)], axis=1)
        u = rng.integers(1, 2**64, size=size, dtype=np.uint64)
        # slab index with per-row offset: q + [r/t > U], i.e. u < ceil(r * 2**64 / t)
        q, r = np.divmod(lv, t)
        thr = np.array([-((-res << 64) // t) for res in range(t)], dtype=np.uint64)
        slab = q + (u[:, None] < thr[r])
        hit = slab == -n
        times = np.arange(horizon_steps + 1)
        occ.append(hit.sum(axis=1))
        wsum.append((hit * times).sum(axis=1))
        last_t = np.where(hit.any(axis=1), horizon_steps - np.argmax(hit[:, ::-1], axis=1), 0)
        last.append(last_t)
        unfinished += int(np.sum(lv[:, -1] > (-n - escape_slabs) * t))
    occ = np.concatenate(occ)
    wsum = np.concatenate(wsum)
    last = np.concatenate(last)
    unreliable = unfinished > 0.01 * n_samples
    flags = ("unreliable",) if unreliable else ()
    grid = tail_grid if tail_grid is not None else sorted({int(x) for x in np.linspace(1, horizon_steps, 12)})
    tail = [(R, mean_report(f"P[last_visit>={R}]", (last >= R).astype(float), seed=seed, flags=flags))
            for R in grid]
    return SlabVisits(
        mean_report(f"occupation[n={n}]", occ.astype(float), seed=seed, flags=flags),
        mean_report(f"weighted_time[n={n}]", wsum.astype(float), seed=seed, flags=flags),
        mean_report(f"last_visit[n={n}]", last.astype(float), seed=seed, flags=flags),
        tail,
        unreliable,
    )


def post_escape_return_rate(g: GraphHandle, horizon: int, n_samples: int, extra_steps: int, rng,
                            seed=None) -> EstimateReport:
    """Frequency with which a walk that fell ``horizon`` slabs below level 0
    climbs back to level 0 within ``extra_steps`` further steps."""
    t = g.t0_units
    target = -horizon * t
    pos = np.zeros(n_samples, dtype=np.int64)
    # walk each sample until it first reaches the escape level
    active = np.ones(n_samples, dtype=bool)
    while active.any():
        idx = np.flatnonzero(active)
        pos[idx] += sample_steps(g, idx.size, rng)
        active[idx] = pos[idx] > target
    returned = np.zeros(n_samples, dtype=bool)
    for lo in range(0, n_samples, 8192):
        rows = pos[lo:lo + 8192]
        steps = sample_steps(g, (rows.size, extra_steps), rng)
        returned[lo:lo + rows.size] = np.max(rows[:, None] + np.cumsum(steps, axis=1), axis=1) >= 0
    return mean_report(f"post_escape_return[H={horizon}]", returned.astype(float), seed=seed)
