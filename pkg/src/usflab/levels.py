"""Random slab offsets with exact slab indexing, plus tilted volumes and a mass-transport checker.

The slab of a vertex x relative to a base vertex v is the integer n with

    (n + U - 1) * t0  <=  log Delta(v, x)  <=  (n + U) * t0,

ties going to the smaller n.  Levels are integers in kappa units and U is a
64-bit fixed-point fraction, so every comparison is exact integer arithmetic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graphs import GraphHandle, VertexRef

ONE = 1 << 64


def draw_offset(rng: np.random.Generator) -> int:
    """Fixed-point offset in (0, 1) as an integer numerator over 2**64."""
    return int(rng.integers(1, ONE, dtype=np.uint64, endpoint=False)) or 1


def slab_of_level(m, t: int, u: int):
    """Slab index of a level difference ``m`` (kappa units).

    Writing m = q*t + r with 0 <= r < t, the answer is q + [r/t > U]:
    the smallest n >= m/t - U.  Works elementwise on integer arrays.
    """
    q, r = np.divmod(m, t) if isinstance(m, np.ndarray) else divmod(m, t)
    if t == 1:
        return q
    above = np.array([res * ONE > u * t for res in range(t)])
    if isinstance(m, np.ndarray):
        return q + above[r].astype(q.dtype)
    return q + int(above[r])


@dataclass(frozen=True)
class LevelIndexer:
    graph: GraphHandle
    base: VertexRef
    u: int  # offset numerator, U = u / 2**64

    @classmethod
    def draw(cls, graph, base, rng):
        return cls(graph, base, draw_offset(rng))

    @classmethod
    def from_float(cls, graph, base, value: float):
        f = Fraction(value).limit_denominator(ONE)
        return cls(graph, base, int(f * ONE))

    @property
    def offset(self) -> Fraction:
        return Fraction(self.u, ONE)

    def slab_index(self, x: VertexRef) -> int:
        return slab_of_level(self.graph.log_delta(self.base, x), self.graph.t0_units, self.u)

    def contains(self, n: int, x: VertexRef) -> bool:
        """Direct check of the defining inequality for x in L_n(base)."""
        m = self.graph.log_delta(self.base, x)
        t = self.graph.t0_units
        return (n * ONE + self.u - ONE) * t <= m * ONE <= (n * ONE + self.u) * t

    def reflected(self, x: VertexRef) -> "LevelIndexer":
        """Indexer based at x with offset 1 - U."""
        return LevelIndexer(self.graph, x, ONE - self.u)

    def rebased(self, x: VertexRef) -> "LevelIndexer":
        """Indexer at x describing the same partition of the vertex set."""
        m = self.graph.log_delta(self.base, x)
        t = self.graph.t0_units
        num = self.u * t - m * ONE
        if num % t:
            raise ValueError("offset not representable at this quantum")
        return LevelIndexer(self.graph, x, (num // t) % ONE or ONE)


def in_slab(graph: GraphHandle, v: VertexRef, x: VertexRef, s: float, t: float) -> bool:
    """Whether log Delta(v, x) lies in the real interval [s, t]."""
    val = graph.log_delta(v, x) * graph.kappa
    return s <= val <= t


def tilted_volume(graph: GraphHandle, component, x: VertexRef, lam: float) -> float:
    """Sum of Delta(x, y)**lam over the component."""
    base = float(graph.kappa_base)
    lx = graph.level(x)
    levels = np.fromiter((graph.level(y) - lx for y in component), dtype=float)
    if lam == 0:
        return float(len(levels))
    return float(np.sum(base ** (lam * levels)))


def tilted_volume_from_counts(levels, counts, base: float, lam: float):
    """Tilted volume from per-level vertex counts (rows = samples)."""
    w = base ** (lam * np.asarray(levels, dtype=float))
    return np.asarray(counts) @ w


@dataclass
class TransportCheck:
    lhs: Fraction | float
    rhs: Fraction | float
    gap: Fraction | float
    flagged: bool


def tmtp_check(graph: GraphHandle, kernel, radius: int, root: VertexRef | None = None):
    """Compare sum_x F(root, x) with sum_x F(x, root) * Delta(root, x) over a ball.

    The ball has radius ``radius + 1``; any nonzero term on the outer sphere
    means the kernel support reaches past ``radius`` and the result is flagged.
    """
    root = graph.root if root is None else root
    dist = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        if dist[u] > radius:
            continue
        for w, _ in graph.neighbors(u):
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    lhs = rhs = 0
    flagged = False
    for x, d in dist.items():
        out = kernel(root, x)
        back = kernel(x, root)
        if d > radius and (out or back):
            flagged = True
        lhs += out
        rhs += back * graph.delta(root, x) if back else 0
    return TransportCheck(lhs, rhs, abs(lhs - rhs), flagged)
