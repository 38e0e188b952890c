"""Lazily generated transitive graph families with quantized modular function.

Four families are available:

* ``tree``: the (b+1)-regular tree with a marked end; every vertex has one
  parent (toward the end) and b children.
* ``grandparent``: the same tree plus an edge from every vertex to its
  grandparent.
* ``dl``: the Diestel-Leader graph DL(q, r), pairs of tree vertices with
  opposite heights.
* ``free_product``: a free product of one of the above with Z2, i.e. copies of
  the base graph joined by single "switch" edges in a tree-like pattern.

The log of the modular function is stored as an integer multiple of a
per-family quantum ``kappa = log(kappa_base)``.  ``level(v)`` is the integer
potential with ``log_delta(u, v) = level(v) - level(u)``.

Tree vertices are addressed by ``(k, length, code)``: go up ``k`` steps from
the root along the marked ray, then down ``length`` steps following the base-b
digits of ``code``.  Child 0 of a ray vertex is the previous ray vertex, so the
address is reduced whenever a leading 0 digit can be absorbed into ``k``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np


class VertexRef(NamedTuple):
    family: str
    coords: tuple


BOUNDARY = VertexRef("boundary", ())

# default cap on |k| for level-set enumeration
LEVEL_SET_CAP = 8
BALL_SIZE_GUARD = 400_000


class InvalidFamily(ValueError):
    pass


# -- tree addresses -----------------------------------------------------------

TREE_ROOT = (0, 0, 0)


def tree_height(a):
    return a[0] - a[1]


def tree_parent(a, b):
    k, length, code = a
    if length == 0:
        return (k + 1, 0, 0)
    return (k, length - 1, code // b)


def tree_child(a, i, b):
    k, length, code = a
    if length == 0 and k > 0 and i == 0:
        return (k - 1, 0, 0)
    return (k, length + 1, code * b + i)


def tree_children(a, b):
    return [tree_child(a, i, b) for i in range(b)]


def tree_valid(a, b):
    k, length, code = a
    if k < 0 or length < 0 or code < 0 or code >= b**length:
        return False
    if k > 0 and length > 0 and code < b ** (length - 1):
        return False  # leading digit 0 must have been absorbed
    return True


# -- families -----------------------------------------------------------------


class GraphHandle:
    """Common interface; subclasses fill in ``_entries`` and ``level``."""

    family = ""

    def __init__(self, kappa_base: Fraction, t0_units: int, degree: int):
        self.kappa_base = Fraction(kappa_base)
        self.t0_units = int(t0_units)
        self.degree = int(degree)
        self._cache: dict = {}

    # quantities in natural units
    @property
    def kappa(self) -> float:
        return math.log(self.kappa_base) if self.kappa_base != 1 else 0.0

    @property
    def t0(self) -> float:
        return self.t0_units * self.kappa

    @property
    def unimodular(self) -> bool:
        return self.kappa_base == 1

    def descriptor(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        params = ", ".join(f"{k}={v}" for k, v in self.descriptor().items() if k != "family")
        return f"{type(self).__name__}({params})"

    # adjacency ---------------------------------------------------------
    def entries(self, v: VertexRef):
        """Neighbor records ``(w, step, orbit)`` where ``orbit = |Stab(v) w|``."""
        try:
            return self._cache[v]
        except KeyError:
            pass
        if len(self._cache) > 500_000:
            self._cache.clear()
        out = tuple(self._entries(v))
        self._cache[v] = out
        return out

    def neighbors(self, v: VertexRef):
        """List of ``(w, step)`` with ``step = log_delta(v, w)`` in kappa units."""
        return [(w, s) for w, s, _ in self.entries(v)]

    def orbit_count(self, x: VertexRef, y: VertexRef) -> int:
        for w, _, orbit in self.entries(x):
            if w == y:
                return orbit
        raise ValueError(f"{y} is not adjacent to {x}")

    def level(self, v: VertexRef) -> int:
        raise NotImplementedError

    def log_delta(self, u: VertexRef, v: VertexRef) -> int:
        return self.level(v) - self.level(u)

    def delta(self, u: VertexRef, v: VertexRef) -> Fraction:
        return self.kappa_base ** self.log_delta(u, v)

    def step_histogram(self) -> dict[int, int]:
        """Multiset of neighbor steps (identical at every vertex)."""
        hist: dict[int, int] = {}
        for _, s in self.neighbors(self.root):
            hist[s] = hist.get(s, 0) + 1
        return dict(sorted(hist.items()))

    def delta_sum(self, v: VertexRef) -> Fraction:
        """Exact sum of Delta(v, w) over neighbors, via orbit counts."""
        total = Fraction(0)
        for w, s, orbit in self.entries(v):
            ratio = Fraction(self.orbit_count(w, v), orbit)
            if ratio != self.kappa_base**s:
                raise AssertionError(f"orbit ratio {ratio} disagrees with step {s} at {v}->{w}")
            total += ratio
        return total

    def is_valid(self, v: VertexRef) -> bool:
        raise NotImplementedError

    def random_vertex(self, rng: np.random.Generator, steps: int = 20) -> VertexRef:
        """Endpoint of a simple random walk from the root."""
        v = self.root
        for j in rng.integers(0, self.degree, size=steps):
            v = self.entries(v)[int(j)][0]
        return v

    # level sets --------------------------------------------------------
    def n_level_set(self, x: VertexRef, k: int, cap: int = LEVEL_SET_CAP) -> set:
        """Vertices at graph distance |k| from x whose level differs by k*t0.

        Since a single step moves the level by at most t0, these are exactly
        the endpoints of |k|-step paths whose every step is sign(k)*t0.
        """
        if abs(k) > cap:
            raise ValueError(f"|k|={abs(k)} exceeds the enumeration cap {cap}")
        if k == 0:
            return {x}
        target = self.t0_units if k > 0 else -self.t0_units
        frontier = {x}
        for _ in range(abs(k)):
            frontier = {w for v in frontier for w, s in self.neighbors(v) if s == target}
        return frontier

    # finite pieces -----------------------------------------------------
    def ball(self, v: VertexRef, radius: int, metric: str = "graph", wired: bool = False,
             guard: int = BALL_SIZE_GUARD) -> "FiniteGraph":
        """Induced subgraph on a ball around v, optionally with wired boundary."""
        if radius < 0:
            raise ValueError("radius must be non-negative")
        if metric == "graph":
            step_ok = None
        elif metric == "tree":
            if self.family != "grandparent":
                raise ValueError("tree metric is only defined for the grandparent family")
            step_ok = {1, -1}
        else:
            raise ValueError(f"unknown metric {metric!r}")
        dist = {v: 0}
        order = [v]
        queue = deque([v])
        while queue:
            u = queue.popleft()
            if dist[u] == radius:
                continue
            for w, s in self.neighbors(u):
                if step_ok is not None and s not in step_ok:
                    continue
                if w not in dist:
                    dist[w] = dist[u] + 1
                    order.append(w)
                    if len(order) > guard:
                        raise MemoryError(f"ball exceeds size guard {guard}")
                    queue.append(w)
        return FiniteGraph.induced(self, order, wired=wired, base=v)


class TreeFamily(GraphHandle):
    family = "tree"

    def __init__(self, b: int):
        if int(b) != b or b < 2:
            raise InvalidFamily(f"tree needs integer b >= 2, got {b}")
        self.b = int(b)
        super().__init__(Fraction(self.b), 1, self.b + 1)
        self.root = VertexRef(self.family, TREE_ROOT)

    def descriptor(self):
        return {"family": "tree", "b": self.b}

    def _entries(self, v):
        a = v.coords
        b = self.b
        yield VertexRef(self.family, tree_parent(a, b)), 1, 1
        for c in tree_children(a, b):
            yield VertexRef(self.family, c), -1, b

    def level(self, v):
        return tree_height(v.coords)

    def is_valid(self, v):
        return v.family == self.family and tree_valid(v.coords, self.b)

    def parent(self, v):
        return VertexRef(self.family, tree_parent(v.coords, self.b))


class GrandparentFamily(TreeFamily):
    family = "grandparent"

    def __init__(self, b: int):
        if int(b) != b or b < 2:
            raise InvalidFamily(f"grandparent needs integer b >= 2, got {b}")
        self.b = int(b)
        GraphHandle.__init__(self, Fraction(self.b), 2, 2 + self.b + self.b**2)
        self.root = VertexRef(self.family, TREE_ROOT)

    def descriptor(self):
        return {"family": "grandparent", "b": self.b}

    def _entries(self, v):
        a = v.coords
        b = self.b
        p = tree_parent(a, b)
        yield VertexRef(self.family, p), 1, 1
        yield VertexRef(self.family, tree_parent(p, b)), 2, 1
        kids = tree_children(a, b)
        for c in kids:
            yield VertexRef(self.family, c), -1, b
        for c in kids:
            for g in tree_children(c, b):
                yield VertexRef(self.family, g), -2, b * b


class DLFamily(GraphHandle):
    """DL(q, r): moves either send x1 to a child and x2 to its parent (q ways)
    or x1 to its parent and x2 to a child (r ways).  The level is h(x1)."""

    family = "dl"

    def __init__(self, q: int, r: int):
        if int(q) != q or int(r) != r or r < 2 or q < r:
            raise InvalidFamily(f"dl needs integers q >= r >= 2, got q={q}, r={r}")
        self.q, self.r = int(q), int(r)
        super().__init__(Fraction(self.q, self.r), 1, self.q + self.r)
        self.root = VertexRef(self.family, (TREE_ROOT, TREE_ROOT))

    def descriptor(self):
        return {"family": "dl", "q": self.q, "r": self.r}

    def _entries(self, v):
        a1, a2 = v.coords
        q, r = self.q, self.r
        up2 = tree_parent(a2, r)
        for c in tree_children(a1, q):
            yield VertexRef(self.family, (c, up2)), -1, q
        up1 = tree_parent(a1, q)
        for c in tree_children(a2, r):
            yield VertexRef(self.family, (up1, c)), 1, r

    def level(self, v):
        return tree_height(v.coords[0])

    def is_valid(self, v):
        if v.family != self.family or len(v.coords) != 2:
            return False
        a1, a2 = v.coords
        return (tree_valid(a1, self.q) and tree_valid(a2, self.r)
                and tree_height(a1) + tree_height(a2) == 0)


class FreeProductFamily(GraphHandle):
    """Free product of a base family with Z2.

    A vertex is ``(exits, w)``: ``exits`` lists the base vertices at which
    switch edges were crossed going away from the root copy, ``w`` is the
    position inside the current copy.  Every non-root copy is entered at the
    base root, so its other vertices lead to further copies.
    """

    family = "free_product"

    def __init__(self, base: GraphHandle):
        if isinstance(base, FreeProductFamily) or not isinstance(base, GraphHandle):
            raise InvalidFamily("free product base must be a tree-like or dl family, not a free product")
        self.base = base
        super().__init__(base.kappa_base, base.t0_units, base.degree + 1)
        self._entry = base.root.coords
        self.root = VertexRef(self.family, ((), base.root.coords))

    def descriptor(self):
        return {"family": "free_product", "base": self.base.descriptor()}

    def _base_ref(self, c):
        return VertexRef(self.base.family, c)

    def switch_neighbor(self, v):
        exits, w = v.coords
        if exits and w == self._entry:
            return VertexRef(self.family, (exits[:-1], exits[-1]))
        return VertexRef(self.family, (exits + (w,), self._entry))

    def _entries(self, v):
        exits, w = v.coords
        for u, s, orbit in self.base.entries(self._base_ref(w)):
            yield VertexRef(self.family, (exits, u.coords)), s, orbit
        yield self.switch_neighbor(v), 0, 1

    def is_switch_edge(self, v, w):
        return self.switch_neighbor(v) == w

    def level(self, v):
        exits, w = v.coords
        lv = self.base.level
        return sum(lv(self._base_ref(u)) for u in exits) + lv(self._base_ref(w))

    def is_valid(self, v):
        if v.family != self.family:
            return False
        exits, w = v.coords
        ok = self.base.is_valid
        if not ok(self._base_ref(w)) or not all(ok(self._base_ref(u)) for u in exits):
            return False
        return all(u != self._entry for u in exits[1:])


def make_family(descriptor=None, **params) -> GraphHandle:
    """Build a family from a JSON-style descriptor ``{"family": ..., params}``."""
    d = dict(descriptor or {}, **params)
    fam = d.get("family")
    try:
        if fam == "tree":
            return TreeFamily(d["b"])
        if fam == "grandparent":
            return GrandparentFamily(d["b"])
        if fam == "dl":
            return DLFamily(d["q"], d["r"])
        if fam == "free_product":
            base = d["base"]
            return FreeProductFamily(base if isinstance(base, GraphHandle) else make_family(base))
    except KeyError as exc:
        raise InvalidFamily(f"missing parameter {exc} for family {fam!r}") from None
    raise InvalidFamily(f"unknown family {fam!r}")


# -- finite graphs ------------------------------------------------------------


@dataclass
class FiniteGraph:
    """Finite multigraph.  ``adj[i]`` repeats j once per parallel edge."""

    vertices: list
    adj: list
    levels: list = None
    boundary: int | None = None
    index: dict = field(default=None, repr=False)

    def __post_init__(self):
        if self.levels is None:
            self.levels = [0] * len(self.vertices)
        if self.index is None:
            self.index = {v: i for i, v in enumerate(self.vertices)}

    @classmethod
    def from_edges(cls, n: int, edges, labels=None):
        adj = [[] for _ in range(n)]
        for i, j in edges:
            if i == j:
                continue
            adj[i].append(j)
            adj[j].append(i)
        return cls(list(labels) if labels is not None else list(range(n)), adj)

    @classmethod
    def induced(cls, g: GraphHandle, order, wired=False, base=None):
        index = {v: i for i, v in enumerate(order)}
        n = len(order)
        adj = [[] for _ in range(n + (1 if wired else 0))]
        for i, v in enumerate(order):
            for w, _ in g.neighbors(v):
                j = index.get(w)
                if j is not None:
                    adj[i].append(j)
                elif wired:
                    adj[i].append(n)
                    adj[n].append(i)
        base_level = g.level(base if base is not None else order[0])
        levels = [g.level(v) - base_level for v in order]
        verts = list(order)
        boundary = None
        if wired:
            verts.append(BOUNDARY)
            levels.append(None)
            boundary = n
        return cls(verts, adj, levels, boundary)

    def __len__(self):
        return len(self.vertices)

    @property
    def n(self):
        return len(self.vertices)

    def degree(self, i):
        return len(self.adj[i])

    def edges(self):
        """Edge list with multiplicity, each as ``(i, j)`` with ``i < j``."""
        return [(i, j) for i, nb in enumerate(self.adj) for j in nb if i < j]

    def adjacency_matrix(self, sparse=False):
        import scipy.sparse as sp
        rows = [i for i, nb in enumerate(self.adj) for _ in nb]
        cols = [j for nb in self.adj for j in nb]
        a = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(self.n, self.n))
        return a if sparse else a.toarray()

    def laplacian(self, sparse=False):
        import scipy.sparse as sp
        a = self.adjacency_matrix(sparse=True)
        lap = sp.diags(np.asarray(a.sum(axis=1)).ravel()) - a
        return lap.tocsr() if sparse else lap.toarray()

    def is_connected(self):
        if self.n == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            for j in self.adj[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == self.n

    def identify(self, i, j):
        """Merge vertex j into vertex i, dropping the loops this creates."""
        if i == j:
            return self
        keep = [k for k in range(self.n) if k != j]
        new = {k: t for t, k in enumerate(keep)}
        new[j] = new[i]
        adj = [[] for _ in keep]
        for k in range(self.n):
            for m in self.adj[k]:
                a, c = new[k], new[m]
                if a != c:
                    adj[a].append(c)
        boundary = None if self.boundary is None else new[self.boundary]
        return FiniteGraph([self.vertices[k] for k in keep], adj,
                           [self.levels[k] for k in keep], boundary)
