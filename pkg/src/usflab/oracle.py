"""Linear-algebra and enumeration oracles on finite graphs.

Green functions use the transition matrix, effective resistances use the
grounded Laplacian; the two are tied by G(a, S) = deg(a) R(a <-> S), which
the tests check.  Small systems are solved densely, large ones by conjugate
gradients with a Jacobi preconditioner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .estimators import linear_fit, proportion_report
from .forest import lerw_finite
from .graphs import FiniteGraph, GrandparentFamily
from .rng import Uniforms

DENSE_LIMIT = 2000
SAP_MAX_K = 14
TREE_COUNT_MAX = 20


def _free_indices(fg: FiniteGraph, killed) -> np.ndarray:
    killed = set(killed)
    if not killed:
        raise ValueError("killed set must be nonempty")
    return np.array([i for i in range(fg.n) if i not in killed])


def green(fg: FiniteGraph, x: int, killed) -> float:
    """Expected number of visits to x (time 0 included) before hitting ``killed``."""
    if x in set(killed):
        raise ValueError("x lies in the killed set")
    free = _free_indices(fg, killed)
    pos = {int(v): i for i, v in enumerate(free)}
    deg = np.array([fg.degree(int(v)) for v in free], dtype=float)
    a = fg.adjacency_matrix(sparse=True)[free][:, free]
    rhs = np.zeros(free.size)
    rhs[pos[x]] = 1.0
    if free.size <= DENSE_LIMIT:
        q = a.toarray() / deg[:, None]
        sol = sla.solve(np.eye(free.size) - q, rhs)
    else:
        q = sp.diags(1 / deg) @ a
        sol = spla.spsolve((sp.identity(free.size) - q).tocsc(), rhs)
    return float(sol[pos[x]])


def effective_resistance(fg: FiniteGraph, a: int, s) -> float:
    """Unit-conductance effective resistance between a and the set s."""
    if a in set(s):
        raise ValueError("a lies in s")
    free = _free_indices(fg, s)
    pos = {int(v): i for i, v in enumerate(free)}
    lap = fg.laplacian(sparse=True)[free][:, free]
    rhs = np.zeros(free.size)
    rhs[pos[a]] = 1.0
    if free.size <= DENSE_LIMIT:
        sol = sla.solve(lap.toarray(), rhs, assume_a="pos")
    else:
        jacobi = sp.diags(1 / lap.diagonal())
        sol, info = spla.cg(lap, rhs, M=jacobi, rtol=1e-12, atol=0.0, maxiter=50 * free.size)
        if info:
            raise RuntimeError(f"conjugate gradient did not converge (info={info})")
    return float(sol[pos[a]])


def transition_probability(fg: FiniteGraph, u: int, v: int) -> float:
    return fg.adj[u].count(v) / fg.degree(u)


def green_product(fg: FiniteGraph, targets, order) -> float:
    """Product of G(w_j, targets ∪ {w_0..w_{j-1}}) along ``order``."""
    killed = set(targets)
    out = 1.0
    for w in order:
        out *= green(fg, w, killed)
        killed.add(w)
    return out


def lerw_path_probability(fg: FiniteGraph, o: int, targets, path) -> float:
    """Probability that loop-erased SRW from o, stopped at ``targets``, equals ``path``."""
    targets = set(targets)
    path = list(path)
    if path[0] != o or path[-1] not in targets:
        raise ValueError("path must run from o to the target set")
    if len(set(path)) != len(path) or any(v in targets for v in path[:-1]):
        raise ValueError("path must be self-avoiding with interior outside the targets")
    trans = 1.0
    for u, v in zip(path[:-1], path[1:]):
        p = transition_probability(fg, u, v)
        if p == 0:
            raise ValueError(f"{u} and {v} are not adjacent")
        trans *= p
    return trans * green_product(fg, targets, path[:-1])


def enumerate_sap(fg: FiniteGraph, v0: int, v1: int, k: int, max_k: int = SAP_MAX_K) -> list:
    """All self-avoiding paths of exactly k edges from v0 to v1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > max_k:
        raise ValueError(f"k={k} exceeds the enumeration guard {max_k}")
    nbrs = [sorted(set(nb)) for nb in fg.adj]
    out = []
    path = [v0]
    on_path = {v0}

    def dfs():
        u = path[-1]
        if len(path) == k + 1:
            if u == v1:
                out.append(list(path))
            return
        for w in nbrs[u]:
            if w in on_path or (w == v1 and len(path) < k):
                continue
            path.append(w)
            on_path.add(w)
            dfs()
            on_path.discard(path.pop())

    dfs()
    return out


def tree_edge_count(fg: FiniteGraph, path) -> int:
    """Number of steps in a grandparent-graph path that are tree edges (level change of 1)."""
    return sum(abs(fg.levels[a] - fg.levels[b]) == 1 for a, b in zip(path[:-1], path[1:]))


def closed_form_path_count(b: int, k: int, n: int) -> int:
    """Closed form b^(k-1) + 1 + sum (b-1) b^(2j) + sum (b-1) b^(2j-1) for even k, 1 <= k < n.

    Enumeration is the reference count; for k >= 4 it exceeds this value by b - 1.
    """
    if k % 2 or not 1 <= k < n:
        raise ValueError("the closed form covers even k with 1 <= k < n only")
    s1 = sum((b - 1) * b ** (2 * j) for j in range(1, (k - 4) // 2 + 1))
    s2 = sum((b - 1) * b ** (2 * j - 1) for j in range(1, (k - 2) // 2 + 1))
    return b ** (k - 1) + 1 + s1 + s2


def spanning_tree_count(fg: FiniteGraph) -> int:
    """Matrix-tree theorem with an exact integer determinant."""
    if fg.n > TREE_COUNT_MAX:
        raise ValueError(f"graph has {fg.n} vertices; guard is {TREE_COUNT_MAX}")
    if not fg.is_connected():
        return 0
    import sympy
    lap = fg.laplacian().round().astype(int)
    return int(sympy.Matrix(lap[1:, 1:].tolist()).det(method="bareiss"))


@dataclass
class Exhaustion:
    graph: FiniteGraph
    v0: int
    v1: int
    b: int
    n: int


def grandparent_exhaustion(b: int, n: int) -> Exhaustion:
    """G_n: the grandparent graph induced on the tree-metric ball of radius n
    around v0; v1 is the parent of v0."""
    g = GrandparentFamily(b)
    fg = g.ball(g.root, n, metric="tree")
    v1 = fg.index[g.parent(g.root)]
    return Exhaustion(fg, fg.index[g.root], v1, b, n)


def local_resistance_bound(b: int) -> float:
    """(b+4)/(b^2+4b+8)."""
    return (b + 4) / (b * b + 4 * b + 8)


@dataclass
class DistanceTail:
    ks: list
    reports: list
    fit: object
    distances: np.ndarray


def fusf_distance_tail(b: int, n: int, k_max: int, samples: int, rng, seed=None,
                       fit_range=(2, 6)) -> DistanceTail:
    """Tail of the tree distance between v0 and v1 in the UST of G_n.

    Running Wilson's algorithm rooted at v1 with v0 first, the tree path
    from v0 to v1 is the loop erasure of the first walk; later walks do not
    change it, so only that walk is simulated.
    """
    ex = grandparent_exhaustion(b, n)
    draws = Uniforms(rng)
    d = np.array([len(lerw_finite(ex.graph, ex.v0, {ex.v1}, draws)) - 1 for _ in range(samples)])
    ks = list(range(1, k_max + 1))
    reports = [proportion_report(f"P[d>={k}]", int(np.sum(d >= k)), samples, seed=seed) for k in ks]
    lo, hi = fit_range
    xs = [k for k in ks if lo <= k <= hi]
    ps = [reports[k - 1].estimate for k in xs]
    fit = linear_fit(xs, np.log(ps), "log-linear") if min(ps) > 0 else None
    return DistanceTail(ks, reports, fit, d)


def lerw_path_frequencies(fg: FiniteGraph, o: int, targets, runs: int, rng) -> dict:
    draws = Uniforms(rng)
    freq: dict = {}
    for _ in range(runs):
        p = tuple(lerw_finite(fg, o, targets, draws))
        freq[p] = freq.get(p, 0) + 1
    return freq


def escape_transform(fg: FiniteGraph, a: int, s) -> float:
    """Resistance from the Green function: R(a <-> s) = G(a, s) / deg(a)."""
    return green(fg, a, s) / fg.degree(a)


def expected_hitting_time(fg: FiniteGraph, start: int, targets) -> float:
    free = _free_indices(fg, targets)
    pos = {int(v): i for i, v in enumerate(free)}
    deg = np.array([fg.degree(int(v)) for v in free], dtype=float)
    a = fg.adjacency_matrix(sparse=True)[free][:, free].toarray() / deg[:, None]
    h = sla.solve(np.eye(free.size) - a, np.ones(free.size))
    return float(h[pos[start]])


__all__ = [
    "green", "effective_resistance", "lerw_path_probability", "green_product",
    "enumerate_sap", "closed_form_path_count", "spanning_tree_count",
    "grandparent_exhaustion", "fusf_distance_tail", "local_resistance_bound",
]
