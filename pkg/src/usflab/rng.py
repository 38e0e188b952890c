"""Deterministic random streams keyed by (seed, replica).

Every replica gets its own Philox counter-based generator, so results do
not depend on how replicas are scheduled across threads.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def stream(seed: int, replica: int = 0, *extra: int) -> np.random.Generator:
    """Independent generator for ``(seed, replica, *extra)``."""
    ss = np.random.SeedSequence([int(seed), int(replica), *map(int, extra)])
    return np.random.Generator(np.random.Philox(ss))


def child(rng: np.random.Generator, key: int) -> np.random.Generator:
    """Derive a reproducible sub-stream from an existing generator."""
    words = rng.integers(0, 2**32, size=4, dtype=np.uint64)
    ss = np.random.SeedSequence([int(w) for w in words] + [int(key)])
    return np.random.Generator(np.random.Philox(ss))


def thread_count(requested: int | None = None) -> int:
    if requested:
        return max(1, int(requested))
    env = os.environ.get("USF_LAB_THREADS")
    return max(1, int(env)) if env else 1


def run_replicas(fn, seed: int, n_replicas: int, threads: int | None = None, key=()):
    """Call ``fn(rng, replica)`` for every replica and return results in replica order.

    ``key`` is appended to the stream key so that separate parts of one
    experiment draw from disjoint streams.
    """
    def job(i):
        return fn(stream(seed, i, *key), i)

    k = thread_count(threads)
    if k == 1 or n_replicas == 1:
        return [job(i) for i in range(n_replicas)]
    with ThreadPoolExecutor(max_workers=k) as pool:
        return list(pool.map(job, range(n_replicas)))


def split(total: int, chunk: int) -> list[int]:
    """Fixed chunk plan: sizes depend only on ``total`` and ``chunk``."""
    sizes = [chunk] * (total // chunk)
    if total % chunk:
        sizes.append(total % chunk)
    return sizes


class Uniforms:
    """Buffered scalar uniforms drawn from a numpy generator.

    Scalar-heavy loops (walks) pull one float at a time; drawing them in
    blocks keeps the per-step overhead low.
    """

    def __init__(self, rng: np.random.Generator, block: int = 8192):
        self.rng = rng
        self.block = block
        self._buf: list[float] = []
        self._pos = 0

    def __call__(self) -> float:
        if self._pos >= len(self._buf):
            self._buf = self.rng.random(self.block).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def index(self, n: int) -> int:
        return int(self() * n)
