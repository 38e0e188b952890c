"""Exact samplers and closed forms for the toy model.

The toy model is the (b+1)-regular tree with a marked end; levels move by +1
toward the end.  In its wired spanning forest the tree T_x containing x is
the future ray of x together with independent Bernoulli(1/b) bond clusters
("bushes") hanging off the ray, and in the x-rooted forest the component of
x is exactly the Bernoulli(1/b) cluster of x.  Everything is sampled level by
level, so only per-level vertex counts are tracked.

Structure of the future ray: it climbs ``peak`` levels (0 with probability
b/(b+1)), then descends forever.  Above the peak, the peak's parent side
carries a vertical chain of ``chain`` extra vertices, each present with
probability 1/b given the previous one.  All other bush vertices descend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate, stats


# -- closed forms -------------------------------------------------------------


def two_point_exact(b: int, n: int) -> Fraction:
    """Probability that x and its n-th ancestor share a tree of the forest."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return Fraction(1, b**n) * (1 + Fraction(n * (b - 1), b + 1))


def _two_point_float(b, d):
    return b ** (-d) * (1 + d * (b - 1) / (b + 1))


def first_moment_series(b: int, n: int, tol: float = 1e-15, max_terms: int = 100_000) -> float:
    """E|T_x ∩ L_n| as the sum over vertices of the level, grouped by distance.

    For n >= 0 the level holds one vertex at distance n and (b-1) b^(k-1) at
    distance n+2k; for n < 0 it holds b^|n| at distance |n| and
    (b-1) b^(|n|+k-1) at distance |n|+2k.  The two-point probability only
    depends on the distance.
    """
    a = abs(n)
    # weights are b^{-n} for n >= 0 and 1 for n < 0 once counts and two-point factors combine
    scale = b ** (-a) if n >= 0 else 1.0
    total = _two_point_float(b, a) * b**a
    for k in range(1, max_terms):
        term = (b - 1) * b ** (a + k - 1) * _two_point_float(b, a + 2 * k)
        total += term
        if term < tol * total:
            break
    return scale * total


def first_moment_exact(b: int, n: int) -> float:
    """Closed form of :func:`first_moment_series`.

    With r = (b-1)/(b+1): the value is (1 + |n| r)(1 + 1/b) + 2r/(b-1),
    multiplied by b^(-n) when n >= 0.
    """
    r = (b - 1) / (b + 1)
    a = abs(n)
    core = (1 + a * r) * (1 + 1 / b) + 2 * r / (b - 1)
    return core * b ** (-n) if n >= 0 else core


def vcluster_level_mean(b: int, n: int) -> float:
    """E|C_x ∩ L_n| for the Bernoulli(1/b) cluster: (1+1/b) b^(-n) above, 1+1/b below."""
    return (1 + 1 / b) * (b ** (-n) if n > 0 else 1.0)


def vcluster_tilted_mean(b: int, lam: float) -> float:
    """E of the cluster's tilted volume; finite for 0 < lam < 1 and symmetric in lam <-> 1-lam."""
    if not 0 < lam < 1:
        return math.inf
    up = b ** (-(1 - lam)) / (1 - b ** (-(1 - lam)))
    down = b ** (-lam) / (1 - b ** (-lam))
    return (1 + 1 / b) * (1 + up + down)


def vcluster_tilted_given_chain(b: int, lam: float, g: int) -> float:
    """E of the cluster's tilted volume given that the upward chain has g vertices.

    A descending critical bush started at level s has expected tilted mass
    b^(lam s) / (1 - b^-lam); x contributes one expected child, each chain
    vertex (b-1)/b of one.
    """
    c = 1 / (1 - b ** (-lam))
    chain = sum(b ** (lam * j) for j in range(1, g + 1))
    bushes = b ** (-lam) * c + (b - 1) / b * c * sum(b ** (lam * (j - 1)) for j in range(1, g + 1))
    return 1 + chain + bushes


def vcluster_tilted_stratified(b: int, lam: float, per: int, gmax: int, floor: int, rng):
    """Estimate of E|cluster|_lam stratified on the chain length.

    Chains longer than ``gmax`` enter through their exact conditional mean;
    this removes the heavy upper tail that makes plain averages unreliable
    for lam > 1/2.  Returns ``(estimate, se, remainder)``.
    """
    est = var = 0.0
    for g in range(gmax + 1):
        v = sample_toy_vclusters(b, floor, per, rng, chain=g).tilted_volume(b, lam)
        w = chain_pmf(b, g)
        est += w * v.mean()
        var += w * w * v.var(ddof=1) / per
    rem = 0.0
    g = gmax + 1
    while True:
        term = chain_pmf(b, g) * vcluster_tilted_given_chain(b, lam, g)
        rem += term
        if term < 1e-16 * (est + rem) or g > gmax + 10_000:
            break
        g += 1
    return est + rem, math.sqrt(var), rem


def peak_pmf(b: int, k: int) -> float:
    """Probability that the future ray climbs exactly k levels."""
    if k == 0:
        return b / (b + 1)
    return (b - 1) / ((b + 1) * b**k)


def chain_pmf(b: int, j: int) -> float:
    return (1 - 1 / b) * b ** (-j)


def ancestor_in_future(b: int, k: int) -> float:
    """Probability that the k-th ancestor lies on the future ray (k >= 1)."""
    return 1 / ((b + 1) * b ** (k - 1))


def gw_second_moment(b: int, n: int) -> float:
    return 1 + (b - 1) * n / b


def gw_survival_exact(b: int, n: int) -> float:
    """P[Z_n > 0] for the critical Bin(b, 1/b) process, by iterating the generating function."""
    q = 0.0
    p = 1 / b
    for _ in range(n):
        q = (1 - p + p * q) ** b
    return 1 - q


def kolmogorov_constant(b: int) -> float:
    """Limit of n P[Z_n > 0]: 2 / variance of the offspring law."""
    return 2 / (1 - 1 / b)


@lru_cache(maxsize=None)
def _gamma_norm(b: int) -> float:
    rate = 2 / (1 - 1 / b)
    val, _ = integrate.quad(lambda z: z * math.exp(-rate * z), 0, math.inf, epsabs=1e-14, epsrel=1e-13)
    return 1 / val


def gamma_limit_density(b: int, z: float) -> float:
    """Limit density of |T_x ∩ L_{-n}| / n: C z exp(-2z/(1-1/b)), C by quadrature."""
    if z <= 0:
        return 0.0
    rate = 2 / (1 - 1 / b)
    return _gamma_norm(b) * z * math.exp(-rate * z)


def gamma_limit_cdf(b: int):
    """CDF of the limit law: Gamma with shape 2 and rate 2/(1-1/b)."""
    return stats.gamma(a=2, scale=(1 - 1 / b) / 2).cdf


# -- exact component samplers ------------------------------------------------


@dataclass
class ToyBatch:
    """Per-level vertex counts for a batch of samples.

    ``counts[i, c]`` is the number of vertices at level ``levels[c]`` in
    sample i; ``levels`` runs from the highest level down to the floor.
    """

    levels: np.ndarray
    counts: np.ndarray
    peak: np.ndarray
    chain: np.ndarray

    def at(self, n: int) -> np.ndarray:
        c = int(self.levels[0] - n)
        if c < 0:
            return np.zeros(len(self.counts), dtype=np.int64)
        if c >= self.counts.shape[1]:
            raise ValueError(f"level {n} is below the sampled floor")
        return self.counts[:, c]

    def tilted_volume(self, b: int, lam: float) -> np.ndarray:
        return self.counts @ (float(b) ** (lam * self.levels.astype(float)))

    def reaches(self, n: int) -> np.ndarray:
        return self.at(n) > 0 if n <= self.levels[0] else np.zeros(len(self.counts), dtype=bool)

    def component(self, i: int) -> "ToyComponent":
        return ToyComponent(self.levels, self.counts[i], int(self.peak[i]), int(self.chain[i]))


@dataclass
class ToyComponent:
    levels: np.ndarray
    counts: np.ndarray
    peak: int
    chain: int

    def count(self, n: int) -> int:
        c = int(self.levels[0] - n)
        return int(self.counts[c]) if 0 <= c < len(self.counts) else 0

    @property
    def size(self) -> int:
        return int(self.counts.sum())

    def vertex_levels(self) -> np.ndarray:
        return np.repeat(self.levels, self.counts)

    def tilted_volume(self, b: int, lam: float) -> float:
        return float(self.counts @ (float(b) ** (lam * self.levels.astype(float))))


def sample_peaks(b: int, size: int, rng) -> np.ndarray:
    up = rng.random(size) < 1 / (b + 1)
    return np.where(up, rng.geometric((b - 1) / b, size), 0)


def sample_chains(b: int, size: int, rng) -> np.ndarray:
    return rng.geometric((b - 1) / b, size) - 1


def sample_toy_components(b: int, level_floor: int, size: int, rng, peak=None, chain=None) -> ToyBatch:
    """Exact law of T_x restricted to levels >= level_floor, for ``size`` samples.

    ``peak`` and ``chain`` may be given to sample conditionally on them.
    """
    if b < 2:
        raise ValueError("b must be >= 2")
    if level_floor > 0:
        raise ValueError("level_floor must be <= 0")
    k = sample_peaks(b, size, rng) if peak is None else np.broadcast_to(np.asarray(peak, dtype=np.int64), size)
    g = sample_chains(b, size, rng) if chain is None else np.broadcast_to(np.asarray(chain, dtype=np.int64), size)
    top = int(max(int((k + g).max(initial=0)), 0))
    levels = np.arange(top, level_floor - 1, -1)
    counts = np.zeros((size, levels.size), dtype=np.int64)
    p = 1 / b
    down = np.zeros(size, dtype=np.int64)  # descending bush vertices at the current level
    climbed = k >= 1
    for c, s in enumerate(levels):
        # ray vertices at level s and their Bernoulli trials toward level s-1
        if s < 0:
            ray, ray_trials = 1, b - 1
        elif s == 0:
            # x has all b children off the ray when the ray climbs first
            ray = np.where(climbed, 2, 1)
            ray_trials = np.where(climbed, 2 * b - 1, b - 1)
        else:
            ray = np.where(s < k, 2, (s == k).astype(np.int64))
            ray_trials = np.where(s < k, 2 * (b - 1), np.where(s == k, b - 2, 0))
        on_chain = ((s > k) & (s <= k + g)).astype(np.int64)
        counts[:, c] = down + ray + on_chain
        if c == levels.size - 1:
            break
        down = rng.binomial(b * down + (b - 1) * on_chain + ray_trials, p)
    return ToyBatch(levels, counts, np.asarray(k), np.asarray(g))


def sample_toy_component(b: int, level_floor: int, rng) -> ToyComponent:
    return sample_toy_components(b, level_floor, 1, rng).component(0)


def sample_toy_vclusters(b: int, level_floor: int, size: int, rng, chain=None) -> ToyBatch:
    """Level counts of the Bernoulli(1/b) cluster of x, restricted to levels >= level_floor."""
    g = sample_chains(b, size, rng) if chain is None else np.broadcast_to(np.asarray(chain, dtype=np.int64), size)
    top = int(g.max(initial=0))
    levels = np.arange(top, level_floor - 1, -1)
    counts = np.zeros((size, levels.size), dtype=np.int64)
    down = np.zeros(size, dtype=np.int64)
    p = 1 / b
    for c, s in enumerate(levels):
        on_chain = ((s >= 1) & (s <= g)).astype(np.int64)
        counts[:, c] = down + on_chain + (1 if s == 0 else 0)
        if c == levels.size - 1:
            break
        trials = b * down + (b - 1) * on_chain + (b if s == 0 else 0)
        down = rng.binomial(trials, p)
    return ToyBatch(levels, counts, np.zeros(size, dtype=np.int64), np.asarray(g))


def sample_toy_vcomponent(b: int, rng, level_floor: int = -200) -> ToyComponent:
    """One cluster; the floor is far below anything a finite cluster reaches in practice."""
    batch = sample_toy_vclusters(b, level_floor, 1, rng)
    comp = batch.component(0)
    if comp.counts[-1]:
        raise RuntimeError("cluster reached the floor; lower level_floor")
    return comp


def sample_vcluster_sizes(b: int, size: int, rng, cap: int = 10**6) -> np.ndarray:
    """Total size of the Bernoulli(1/b) cluster of x, capped at ``cap``.

    x has b+1 neighbors, each opening a critical Bin(b, 1/b) Galton-Watson tree.
    """
    p = 1 / b
    z = rng.binomial(b + 1, p, size=size).astype(np.int64)
    total = 1 + z
    active = np.flatnonzero((z > 0) & (total < cap))
    while active.size:
        z_a = rng.binomial(b * z[active], p)
        z[active] = z_a
        total[active] += z_a
        active = active[(z_a > 0) & (total[active] < cap)]
    return np.minimum(total, cap)


def vcluster_size_tail_exact(b: int, thresholds) -> np.ndarray:
    """P[|C_x| >= R] from the hitting-time formula for total progeny.

    With j initial individuals, P[total = m] = (j/m) P[Bin(b m, 1/b) = m - j].
    """
    thresholds = np.asarray(thresholds, dtype=np.int64)
    rmax = int(thresholds.max())
    m = np.arange(1, rmax + 1)
    pmf = np.zeros(rmax + 1)  # pmf of |C| on 1..rmax
    pmf[1] = stats.binom.pmf(0, b + 1, 1 / b)
    for j in range(1, b + 2):
        pj = stats.binom.pmf(j, b + 1, 1 / b)
        prog = np.where(m >= j, j / m * stats.binom.pmf(m - j, b * m, 1 / b), 0.0)
        # |C| = 1 + total progeny
        pmf[2:] += pj * prog[: rmax - 1]
    cdf_below = np.concatenate([[0.0], np.cumsum(pmf)])  # cdf_below[R] = P[|C| < R]
    return 1 - cdf_below[thresholds]


def vcluster_level0_tail_exact(b: int, ks, terms: int = 3000, max_chain: int = 160) -> np.ndarray:
    """P[|C_x ∩ L_0| >= k] computed with truncated generating functions.

    The level-0 vertices are x plus, for each chain vertex at height i, the
    generation-i descendants through its b-1 other children.  Generating
    functions are composed modulo s**terms, which is exact for the
    coefficients kept; the tail is summed directly (no 1 - cdf cancellation),
    and mass beyond ``terms`` is negligible for k <= 100.
    """
    p = 1 / b

    def trunc(a):
        return a[:terms]

    def power(poly, e):
        out = np.zeros(terms)
        out[0] = 1.0
        for _ in range(e):
            out = trunc(np.convolve(out, poly))
        return out

    def affine(g):  # 1 - p + p*g(s)
        h = p * g
        h[0] += 1 - p
        return h

    gen = np.zeros(terms)
    gen[1] = 1.0  # generation size generating function, starts at s
    level0 = np.zeros(terms)
    level0[1] = 1.0  # x itself
    total = chain_pmf(b, 0) * level0
    for i in range(1, max_chain + 1):
        y = power(affine(gen), b - 1)
        level0 = trunc(np.convolve(level0, y))
        total += chain_pmf(b, i) * level0
        gen = power(affine(gen), b)
    tail = np.cumsum(total[::-1])[::-1]
    return np.array([tail[int(k)] for k in ks])


# -- Galton-Watson processes -------------------------------------------------


@dataclass
class GwTrace:
    sizes: np.ndarray
    law: str


def gw(b: int, n: int, rng, first: str = "bin") -> GwTrace:
    """Critical Bin(b, 1/b) process from one ancestor; ``first="bin_minus"``
    draws the first generation from Bin(b-1, 1/b)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    z = np.empty(n + 1, dtype=np.int64)
    z[0] = 1
    for i in range(1, n + 1):
        trials = (b - 1) if (i == 1 and first == "bin_minus") else b * z[i - 1]
        z[i] = rng.binomial(trials, 1 / b) if trials else 0
    return GwTrace(z, "first Bin(b-1,1/b)" if first == "bin_minus" else "Bin(b,1/b)")


def gw_immigration(b: int, n: int, rng) -> GwTrace:
    """Critical process with Bin(b-1, 1/b) immigrants each generation, from Z_0 = 0."""
    z = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        z[i] = rng.binomial(b * z[i - 1], 1 / b) + rng.binomial(b - 1, 1 / b)
    return GwTrace(z, "immigration Bin(b-1,1/b)")


def gw_final(b: int, n: int, size: int, rng, immigration: bool = False) -> np.ndarray:
    """Vector of Z_n over ``size`` independent runs."""
    p = 1 / b
    if immigration:
        z = np.zeros(size, dtype=np.int64)
        for _ in range(n):
            z = rng.binomial(b * z, p) + rng.binomial(b - 1, p, size=size)
        return z
    # without immigration only surviving runs need work
    z = np.ones(size, dtype=np.int64)
    alive = np.arange(size)
    for _ in range(n):
        z[alive] = rng.binomial(b * z[alive], p)
        alive = alive[z[alive] > 0]
    return z
