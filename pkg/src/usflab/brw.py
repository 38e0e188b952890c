"""Free-product percolation and its branching-random-walk comparison.

Percolation on a free product G0 * Z2 keeps every switch edge and uses an
independent copy of a base percolation inside each copy of G0.  Truncating
each copy's cluster to the ball of radius M around its entry vertex turns the
cluster into a branching random walk: a particle at a vertex has one child
per other vertex of the truncated cluster, displaced by the log of the
modular-function ratio.  Switch edges carry zero displacement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .estimators import EstimateReport, linear_fit, mean_report
from .forest import explore_component, sample_ust_finite
from .graphs import FreeProductFamily, GraphHandle, GrandparentFamily, TreeFamily, VertexRef
from .rng import Uniforms

POPULATION_CAP = 10**6


# -- base percolations on G0, sampled around the root ------------------------


class BasePercolation:
    """Cluster of the root inside the ball of radius M, restricted to the ball."""

    exact = False
    approximate = False

    def __init__(self, graph: GraphHandle, radius: int):
        if radius < 1:
            raise ValueError("radius M must be >= 1")
        self.graph = graph
        self.radius = radius
        self.ball = graph.ball(graph.root, radius)
        self._root_level = graph.level(graph.root)

    def cluster(self, rng) -> list:
        """Vertices of the truncated cluster, root excluded."""
        raise NotImplementedError

    def displacements(self, rng) -> np.ndarray:
        g = self.graph
        return np.array([g.level(v) - self._root_level for v in self.cluster(rng)], dtype=np.int64)

    def sample_many(self, rng, count: int):
        """Offspring counts and concatenated displacements for ``count`` particles."""
        parts = [self.displacements(rng) for _ in range(count)]
        sizes = np.array([p.size for p in parts], dtype=np.int64)
        disp = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
        return sizes, disp

    def describe(self) -> dict:
        return {"base": type(self).__name__, "graph": self.graph.descriptor(), "M": self.radius}


class AllEdges(BasePercolation):
    """Every edge open: the cluster is the whole ball."""

    exact = True

    def __init__(self, graph, radius):
        super().__init__(graph, radius)
        root = graph.root
        self._members = [v for v in self.ball.vertices if v != root]
        self._disp = np.array([graph.level(v) - self._root_level for v in self._members], dtype=np.int64)

    def cluster(self, rng):
        return list(self._members)

    def displacements(self, rng):
        return self._disp.copy()

    def sample_many(self, rng, count):
        return np.full(count, self._disp.size, dtype=np.int64), np.tile(self._disp, count)

    def exact_lambda(self, alpha: float) -> float:
        k = self.graph.kappa
        return float(np.sum(np.exp(-alpha * k * self._disp)))

    def exact_lambda_prime(self, alpha: float) -> float:
        k = self.graph.kappa
        x = k * self._disp
        return float(np.sum(x * np.exp(-alpha * x)))


class EmptyBase(BasePercolation):
    exact = True

    def cluster(self, rng):
        return []

    def sample_many(self, rng, count):
        return np.zeros(count, dtype=np.int64), np.zeros(0, dtype=np.int64)

    def exact_lambda(self, alpha):
        return 0.0

    def exact_lambda_prime(self, alpha):
        return 0.0


class BernoulliBonds(BasePercolation):
    """Independent bond percolation with parameter p inside the ball."""

    def __init__(self, graph, radius, p: float):
        super().__init__(graph, radius)
        self.p = p
        fg = self.ball
        self._edges = np.array(fg.edges(), dtype=np.int64).reshape(-1, 2)
        self._root = fg.index[graph.root]
        # on a ball that is a tree, y joins the cluster iff its whole path is open
        self.exact = len(self._edges) == fg.n - 1
        if self.exact:
            dist = {self._root: 0}
            queue = [self._root]
            for u in queue:
                for w in fg.adj[u]:
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        queue.append(w)
            others = [i for i in range(fg.n) if i != self._root]
            self._hops = np.array([dist[i] for i in others])
            self._disp = np.array([graph.level(fg.vertices[i]) - self._root_level for i in others])

    def cluster(self, rng):
        fg = self.ball
        open_ = rng.random(len(self._edges)) < self.p
        adj: dict = {}
        for (i, j) in self._edges[open_]:
            adj.setdefault(int(i), []).append(int(j))
            adj.setdefault(int(j), []).append(int(i))
        seen = {self._root}
        stack = [self._root]
        while stack:
            for w in adj.get(stack.pop(), ()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return [fg.vertices[i] for i in seen if i != self._root]

    def exact_lambda(self, alpha):
        x = self.graph.kappa * self._disp
        return float(np.sum(self.p ** self._hops * np.exp(-alpha * x)))

    def exact_lambda_prime(self, alpha):
        x = self.graph.kappa * self._disp
        return float(np.sum(self.p ** self._hops * x * np.exp(-alpha * x)))

    def describe(self):
        return dict(super().describe(), p=self.p)


class ToyWusfBase(BasePercolation):
    """Wired spanning forest of the tree family, component of the root in the ball.

    Light clusters: a negative control.  Sampled with Wilson's algorithm
    rooted at infinity, so it carries the escape-horizon approximation.
    """

    approximate = True

    def __init__(self, graph: TreeFamily, radius, horizon: int = 20):
        super().__init__(graph, radius)
        self.horizon = horizon
        members = set(self.ball.vertices)

        def within(v):
            return v in members
        within.min_level = min(graph.level(v) for v in members)
        self._within = within

    def cluster(self, rng):
        _, members = explore_component(self.graph, self.graph.root, self._within, self.horizon,
                                       draws=Uniforms(rng, block=1024))
        return [v for v in members if v != self.graph.root]

    def describe(self):
        return dict(super().describe(), horizon=self.horizon)


class GrandparentFusfBase(BasePercolation):
    """Free spanning forest of the grandparent graph approximated by the UST of
    the exhaustion G_n; the cluster is the root's component inside its
    graph-metric ball of radius M."""

    approximate = True

    def __init__(self, graph: GrandparentFamily, radius, exhaustion: int):
        super().__init__(graph, radius)
        self.exhaustion = exhaustion
        self.fg = graph.ball(graph.root, exhaustion, metric="tree")
        inside = set(self.ball.vertices)
        self._inside = np.array([v in inside for v in self.fg.vertices])
        self._root = self.fg.index[graph.root]

    def cluster(self, rng):
        tree = sample_ust_finite(self.fg, self._root, draws=Uniforms(rng, block=4096))
        adj: dict = {}
        for v, p in enumerate(tree.parent):
            if p >= 0 and self._inside[v] and self._inside[p]:
                adj.setdefault(v, []).append(p)
                adj.setdefault(p, []).append(v)
        seen = {self._root}
        stack = [self._root]
        while stack:
            for w in adj.get(stack.pop(), ()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return [self.fg.vertices[i] for i in seen if i != self._root]

    def describe(self):
        return dict(super().describe(), exhaustion=self.exhaustion)


# -- offspring law and estimates ---------------------------------------------


@dataclass
class OffspringLaw:
    base: BasePercolation

    @property
    def kappa(self) -> float:
        return self.base.graph.kappa

    @property
    def radius(self) -> int:
        return self.base.radius

    def sample(self, rng) -> np.ndarray:
        return self.base.displacements(rng)

    def sample_many(self, rng, count):
        return self.base.sample_many(rng, count)


def _draw(base, samples, rng):
    sizes, disp = base.sample_many(rng, samples)
    owner = np.repeat(np.arange(samples), sizes)
    return sizes, disp, owner


def estimate_lambda(base: BasePercolation, alpha: float, samples: int, rng, seed=None) -> EstimateReport:
    """E[sum_i exp(-alpha X_i)] with X_i in natural log units."""
    sizes, disp, owner = _draw(base, samples, rng)
    vals = np.bincount(owner, weights=np.exp(-alpha * base.graph.kappa * disp), minlength=samples)
    ref = base.exact_lambda(alpha) if base.exact else None
    flags = ("approximate-base",) if base.approximate else ()
    return mean_report(f"lambda[alpha={alpha},M={base.radius}]", vals, seed=seed, reference=ref, flags=flags)


def estimate_lambda_prime(base: BasePercolation, alpha: float, samples: int, rng, seed=None) -> EstimateReport:
    """E[sum_i X_i exp(-alpha X_i)]."""
    sizes, disp, owner = _draw(base, samples, rng)
    x = base.graph.kappa * disp
    vals = np.bincount(owner, weights=x * np.exp(-alpha * x), minlength=samples)
    ref = base.exact_lambda_prime(alpha) if base.exact else None
    flags = ("approximate-base",) if base.approximate else ()
    return mean_report(f"lambda_prime[alpha={alpha},M={base.radius}]", vals, seed=seed, reference=ref, flags=flags)


@dataclass
class BaseSummary:
    lam: EstimateReport
    lam_prime: EstimateReport
    offspring: EstimateReport
    f_sum: EstimateReport  # lambda' + lambda per sample, at alpha = -1
    llogl: EstimateReport  # E[<alpha,L> log+ <alpha,L>]


def summarize_base(base: BasePercolation, samples: int, rng, alpha: float = -1.0, seed=None) -> BaseSummary:
    """All per-sample statistics of the offspring law from one shared sample."""
    sizes, disp, owner = _draw(base, samples, rng)
    x = base.graph.kappa * disp
    w = np.exp(-alpha * x)
    lam = np.bincount(owner, weights=w, minlength=samples)
    lamp = np.bincount(owner, weights=x * w, minlength=samples)
    flags = ("approximate-base",) if base.approximate else ()
    tag = f"alpha={alpha},M={base.radius}"
    with np.errstate(divide="ignore"):
        llogl = np.where(lam > 1, lam * np.log(np.where(lam > 0, lam, 1)), 0.0)
    return BaseSummary(
        mean_report(f"lambda[{tag}]", lam, seed=seed, flags=flags,
                    reference=base.exact_lambda(alpha) if base.exact else None),
        mean_report(f"lambda_prime[{tag}]", lamp, seed=seed, flags=flags,
                    reference=base.exact_lambda_prime(alpha) if base.exact else None),
        mean_report(f"offspring[M={base.radius}]", sizes.astype(float), seed=seed, flags=flags),
        mean_report(f"lambda_plus_lambda_prime[{tag}]", lam + lamp, seed=seed, flags=flags),
        mean_report(f"llogl[{tag}]", llogl, seed=seed, flags=flags),
    )


def biggins_check(lam: float, lam_prime: float, alpha: float, llogl: float | None = None) -> dict:
    """Biggins' three conditions plus the sufficient form used at alpha = -1.

    cond2 needs E[<alpha,L> log+ <alpha,L>]; without it the offspring law is
    assumed bounded, which makes the condition automatic.
    """
    cond1 = 0 < lam < math.inf and math.isfinite(lam_prime)
    cond2 = True if llogl is None else math.isfinite(llogl)
    cond3 = cond1 and alpha * lam_prime / lam < math.log(lam)
    out = {"cond1": bool(cond1), "cond2": bool(cond2), "cond3": bool(cond3)}
    if alpha == -1:
        out["sufficient"] = bool(lam > math.e and lam_prime + lam >= 0)
    return out


# -- branching random walk ---------------------------------------------------


@dataclass
class BrwTrace:
    weights: list  # W_k, normalized by lambda^k
    log_mass: list  # log sum_{|u|=k} exp(-alpha S(u))
    population: list
    capped: bool = False
    flags: tuple = field(default_factory=tuple)


def brw_weight_growth(law: OffspringLaw, alpha: float, n: int, rng, lam: float | None = None,
                      cap: int = POPULATION_CAP) -> BrwTrace:
    """Run the branching random walk for n generations tracking positions (kappa units)."""
    if lam is None:
        if not law.base.exact:
            raise ValueError("lambda(alpha) must be estimated first for a random base")
        lam = law.base.exact_lambda(alpha)
    k = law.kappa
    pos = np.zeros(1, dtype=np.int64)
    weights, log_mass, population = [1.0], [0.0], [1]
    capped = False
    for gen in range(1, n + 1):
        sizes, disp = law.sample_many(rng, pos.size)
        pos = np.repeat(pos, sizes) + disp
        if pos.size > cap:
            capped = True
            break
        population.append(int(pos.size))
        if pos.size == 0:
            weights.append(0.0)
            log_mass.append(-math.inf)
            continue
        e = -alpha * k * pos
        top = float(e.max())
        lm = top + math.log(float(np.sum(np.exp(e - top))))
        log_mass.append(lm)
        weights.append(math.exp(lm - gen * math.log(lam)) if lam > 0 else math.inf)
    return BrwTrace(weights, log_mass, population, capped, ("population-cap",) if capped else ())


def martingale_increments(law: OffspringLaw, alpha: float, n: int, replicas: int, rng,
                          lam: float | None = None, seed=None) -> list:
    """Reports for W_{k+1} - W_k, k = 0..n-1, over independent trajectories."""
    traces = [brw_weight_growth(law, alpha, n, rng, lam) for _ in range(replicas)]
    if any(t.capped for t in traces):
        raise MemoryError("population cap hit; lower n")
    w = np.array([t.weights for t in traces])
    inc = np.diff(w, axis=1)
    return [mean_report(f"W[{k + 1}]-W[{k}]", inc[:, k], seed=seed, reference=0.0) for k in range(n)]


def growth_slope(trace: BrwTrace, start: int = 1):
    """Least-squares slope of log sum exp(-alpha S) against the generation."""
    ks = np.arange(start, len(trace.log_mass))
    return linear_fit(ks, np.array(trace.log_mass)[start:], "log-linear")


def free_product_generations(fp: FreeProductFamily, base: BasePercolation, n: int, rng, cap: int = 10**5):
    """Grow the truncated free-product cluster of the root for n switch generations.

    Returns per-generation lists of free-product vertices.  Each particle is
    the entry vertex of a fresh copy (or the root); its children are the other
    vertices of the copy's truncated cluster, each followed across its switch
    edge, which must not change the level.
    """
    if base.graph.descriptor() != fp.base.descriptor():
        raise ValueError("base percolation lives on a different graph")
    gens = [[fp.root]]
    for _ in range(n):
        nxt = []
        for particle in gens[-1]:
            exits, w = particle.coords
            for y in base.cluster(rng):
                inside = VertexRef(fp.family, (exits, y.coords))
                across = fp.switch_neighbor(inside)
                if fp.level(across) != fp.level(inside):
                    raise AssertionError("switch edge changed the level")
                nxt.append(across)
            if len(nxt) > cap:
                raise MemoryError("population cap exceeded")
        gens.append(nxt)
    return gens


__all__ = [
    "AllEdges", "EmptyBase", "BernoulliBonds", "ToyWusfBase", "GrandparentFusfBase",
    "OffspringLaw", "estimate_lambda", "estimate_lambda_prime", "summarize_base",
    "biggins_check", "brw_weight_growth", "martingale_increments", "growth_slope",
    "free_product_generations",
]
