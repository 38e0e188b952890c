"""Wilson's algorithm on lazily generated graphs and on finite graphs.

On an infinite graph the walks are rooted at infinity: a walk stops when it
hits the current forest or when it has fallen ``horizon`` slabs below a
reference level, after which it is declared to have reached infinity.  The
end vertex of such a path points to :data:`INFINITY`.

Wilson's algorithm gives the same law for any vertex ordering, including
orderings chosen adaptively from the forest built so far.  The component
explorer uses this to grow only the tree containing x.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .graphs import FiniteGraph, GraphHandle
from .rng import Uniforms
from .walk import DEFAULT_CAP, DEFAULT_HORIZON

INFINITY = "infinity"


@dataclass
class OrientedForest:
    """Explored forest fragment.  ``parent[v]`` is the out-neighbor of v,
    :data:`INFINITY` for escaped paths, or ``None`` for a root vertex."""

    parent: dict = field(default_factory=dict)
    component: dict = field(default_factory=dict)
    cap_hits: int = 0
    walks: int = 0
    steps: int = 0
    _next_id: int = 0

    def __contains__(self, v):
        return v in self.parent

    def __len__(self):
        return len(self.parent)

    def new_component(self) -> int:
        self._next_id += 1
        return self._next_id - 1

    def add_root(self, v):
        self.parent[v] = None
        self.component[v] = self.new_component()

    def add_path(self, path, escaped: bool):
        """Attach a loop-erased path; its last vertex is either already in the
        forest or (when ``escaped``) new and pointing to infinity."""
        if escaped:
            cid = self.new_component()
            last = path[-1]
            self.parent[last] = INFINITY
            self.component[last] = cid
        else:
            cid = self.component[path[-1]]
        for a, b in zip(path[:-1], path[1:]):
            self.parent[a] = b
            self.component[a] = cid

    def future(self, x) -> list:
        out = [x]
        v = self.parent[x]
        while v is not None and v != INFINITY:
            out.append(v)
            v = self.parent[v]
        return out

    def children(self) -> dict:
        kids: dict = {}
        for v, p in self.parent.items():
            if p is not None and p != INFINITY:
                kids.setdefault(p, []).append(v)
        return kids

    def past(self, x, kids=None) -> set:
        kids = self.children() if kids is None else kids
        out = {x}
        stack = [x]
        while stack:
            for w in kids.get(stack.pop(), ()):
                out.add(w)
                stack.append(w)
        return out

    def tree_of(self, x) -> set:
        cid = self.component[x]
        return {v for v, c in self.component.items() if c == cid}

    def reachable(self, x, within) -> set:
        """Vertices joined to x by forest edges whose endpoints all satisfy ``within``."""
        nbrs: dict = {}
        for a, b in self.edges():
            nbrs.setdefault(a, []).append(b)
            nbrs.setdefault(b, []).append(a)
        out = {x}
        stack = [x]
        while stack:
            for w in nbrs.get(stack.pop(), ()):
                if w not in out and within(w):
                    out.add(w)
                    stack.append(w)
        return out

    def connected(self, x, y) -> bool:
        return self.component[x] == self.component[y]

    def edges(self):
        return [(v, p) for v, p in self.parent.items() if p is not None and p != INFINITY]

    def check(self):
        """Every non-root vertex has one out-edge and following them never cycles."""
        for v in self.parent:
            seen = set()
            u = v
            while u is not None and u != INFINITY:
                if u in seen:
                    raise AssertionError(f"directed cycle through {u}")
                seen.add(u)
                u = self.parent[u]
        return True

    def to_json(self) -> str:
        def enc(v):
            return v if v == INFINITY or v is None else [v.family, _plain(v.coords)]
        return json.dumps({"edges": [[enc(a), enc(b)] for a, b in self.parent.items()]})


def _plain(x):
    return [_plain(y) for y in x] if isinstance(x, tuple) else x


def wilson_branch(g: GraphHandle, forest: OrientedForest, start, escape_level: int,
                  draws: Uniforms, cap: int = DEFAULT_CAP):
    """One Wilson walk from ``start`` with on-the-fly loop erasure.

    Returns the loop-erased path and whether it escaped.  Levels are absolute
    (``g.level``).
    """
    path = [start]
    pos = {start: 0}
    v = start
    lvl = g.level(start)
    d = g.degree
    parent = forest.parent
    steps = 0
    escaped = lvl <= escape_level
    while v not in parent and not escaped:
        if steps >= cap:
            forest.cap_hits += 1
            escaped = True
            break
        v, s, _ = g.entries(v)[int(draws() * d)]
        lvl += s
        steps += 1
        j = pos.get(v)
        if j is not None:
            for u in path[j + 1:]:
                del pos[u]
            del path[j + 1:]
        else:
            pos[v] = len(path)
            path.append(v)
        escaped = lvl <= escape_level and v not in parent
    forest.walks += 1
    forest.steps += steps
    return path, escaped


def _escape_level(g, ref_level, horizon):
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    return ref_level - horizon * g.t0_units


def sample_wusf_region(g: GraphHandle, region, horizon: int = DEFAULT_HORIZON, rng=None,
                       ref_level: int | None = None, cap: int = DEFAULT_CAP, draws=None,
                       forest: OrientedForest | None = None) -> OrientedForest:
    """Wilson's algorithm rooted at infinity, visiting ``region`` in order.

    A walk escapes once it is ``horizon`` slabs below ``ref_level`` (default:
    the lowest level in the region).
    """
    region = list(region)
    if ref_level is None:
        ref_level = min(g.level(v) for v in region)
    esc = _escape_level(g, ref_level, horizon)
    draws = draws or Uniforms(rng)
    forest = forest if forest is not None else OrientedForest()
    for v in region:
        if v in forest:
            continue
        path, out = wilson_branch(g, forest, v, esc, draws, cap)
        forest.add_path(path, out)
    return forest


def explore_component(g: GraphHandle, x, within, horizon: int = DEFAULT_HORIZON, rng=None,
                      ref_level: int | None = None, rooted: bool = False, cap: int = DEFAULT_CAP,
                      draws=None):
    """Grow the forest tree containing x, restricted to vertices accepted by ``within``.

    Walks are started from every neighbor (inside ``within``) of the current
    tree of x.  With ``rooted=True`` x itself is a root, giving the x-rooted
    forest.  Returns ``(forest, members)`` where ``members`` is the set of
    vertices of x's tree that satisfy ``within``.
    """
    draws = draws or Uniforms(rng)
    if ref_level is None:
        # escape is measured from the lowest level the exploration can reach
        ref_level = getattr(within, "min_level", None)
        if ref_level is None:
            ref_level = g.level(x)
    esc = _escape_level(g, ref_level, horizon)
    forest = OrientedForest()
    if rooted:
        forest.add_root(x)
    else:
        path, out = wilson_branch(g, forest, x, esc, draws, cap)
        forest.add_path(path, out)
    cid = forest.component[x]
    members = set()
    queue = deque()

    def absorb(vertices):
        for v in vertices:
            if v not in members and forest.component.get(v) == cid and within(v):
                members.add(v)
                queue.append(v)

    absorb(forest.tree_of(x))
    while queue:
        u = queue.popleft()
        for w, _ in g.neighbors(u):
            if w in forest or not within(w):
                continue
            path, out = wilson_branch(g, forest, w, esc, draws, cap)
            forest.add_path(path, out)
            if not out and forest.component[w] == cid:
                absorb(path)
    return forest, members


def sample_vwusf_component(g: GraphHandle, v, within, horizon: int = DEFAULT_HORIZON, rng=None,
                           ref_level: int | None = None, cap: int = DEFAULT_CAP, draws=None):
    """Component of v in the v-rooted forest, restricted to ``within``."""
    return explore_component(g, v, within, horizon, rng, ref_level, rooted=True, cap=cap, draws=draws)


def level_window(g: GraphHandle, x, floor: int, ceiling: int | None = None):
    """Predicate for vertices whose level relative to x lies in [floor, ceiling]."""
    lx = g.level(x)

    def ok(v):
        d = g.level(v) - lx
        return d >= floor and (ceiling is None or d <= ceiling)
    ok.min_level = lx + floor
    return ok


def ball_predicate(g: GraphHandle, x, radius: int):
    vertices = set(g.ball(x, radius).vertices)

    def ok(v):
        return v in vertices
    ok.min_level = min(g.level(v) for v in vertices)
    return ok


# -- finite graphs ------------------------------------------------------------


@dataclass
class SpanningTree:
    parent: list  # parent[root] == -1

    def edges(self) -> frozenset:
        return frozenset(tuple(sorted((v, p))) for v, p in enumerate(self.parent) if p >= 0)

    def path_to_root(self, v) -> list:
        out = [v]
        while self.parent[out[-1]] >= 0:
            out.append(self.parent[out[-1]])
        return out


def sample_ust_finite(fg: FiniteGraph, root: int, rng=None, order=None, draws=None) -> SpanningTree:
    """Uniform spanning tree of a finite multigraph by Wilson's algorithm.

    The classical last-exit implementation: walking overwrites ``nxt`` so
    that retracing from the start follows the loop-erased path.
    """
    if not fg.is_connected():
        raise ValueError("graph is disconnected")
    draws = draws or Uniforms(rng)
    adj = fg.adj
    n = fg.n
    in_tree = [False] * n
    nxt = [-1] * n
    in_tree[root] = True
    for start in (order if order is not None else range(n)):
        u = start
        while not in_tree[u]:
            nb = adj[u]
            nxt[u] = nb[int(draws() * len(nb))]
            u = nxt[u]
        u = start
        while not in_tree[u]:
            in_tree[u] = True
            u = nxt[u]
    nxt[root] = -1
    return SpanningTree(nxt)


def lerw_finite(fg: FiniteGraph, start: int, targets, draws: Uniforms, cap: int = DEFAULT_CAP) -> list:
    """Loop-erased SRW path from ``start`` to the first hit of ``targets``."""
    targets = set(targets)
    adj = fg.adj
    path = [start]
    pos = {start: 0}
    u = start
    steps = 0
    while u not in targets:
        nb = adj[u]
        u = nb[int(draws() * len(nb))]
        steps += 1
        if steps > cap:
            raise RuntimeError("walk cap exceeded")
        j = pos.get(u)
        if j is not None:
            for w in path[j + 1:]:
                del pos[w]
            del path[j + 1:]
        else:
            pos[u] = len(path)
            path.append(u)
    return path
