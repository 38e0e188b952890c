import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from usflab.graphs import make_family
from usflab.levels import ONE, LevelIndexer, slab_of_level, tilted_volume, tmtp_check

TREE = make_family(family="tree", b=2)
GP = make_family(family="grandparent", b=2)


def test_slab_examples():
    idx = LevelIndexer.from_float(TREE, TREE.root, 0.3)
    assert idx.slab_index(TREE.root) == 0
    assert idx.slab_index(TREE.parent(TREE.root)) == 1
    child = next(w for w, s in TREE.neighbors(TREE.root) if s == -1)
    assert idx.slab_index(child) == -1


@settings(max_examples=200, deadline=None)
@given(st.integers(-50, 50), st.integers(1, 4), st.integers(1, ONE - 1))
def test_slab_index_satisfies_inequality(m, t, u):
    n = slab_of_level(m, t, u)
    assert (n * ONE + u - ONE) * t <= m * ONE <= (n * ONE + u) * t
    # the tie rule picks the smaller index
    assert not ((n - 1) * ONE + u - ONE) * t <= m * ONE <= ((n - 1) * ONE + u) * t


def test_vectorized_slab_matches_scalar():
    m = np.arange(-40, 41)
    u = int(0.61 * ONE)
    for t in (1, 2, 3):
        assert slab_of_level(m, t, u).tolist() == [slab_of_level(int(x), t, u) for x in m]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([TREE, GP]), st.integers(0, 2**32 - 1))
def test_reflection(g, seed):
    rng = np.random.default_rng(seed)
    v = g.random_vertex(rng, steps=8)
    x = g.random_vertex(rng, steps=8)
    idx = LevelIndexer.draw(g, v, rng)
    n = idx.slab_index(x)
    assert idx.contains(n, x)
    # x in L_n(v) with offset U  <=>  v in L_{-n}(x) with offset 1 - U
    assert idx.reflected(x).contains(-n, v)


def test_rebased_indexer_gives_same_partition():
    rng = np.random.default_rng(4)
    idx = LevelIndexer(GP, GP.root, 3 * ONE // 8 * 2)  # u/2^64 = 3/4 keeps the offset exact at t = 2
    other = GP.random_vertex(rng, steps=5)
    re = idx.rebased(other)
    vs = [GP.random_vertex(rng, steps=6) for _ in range(30)]
    for a in vs:
        for c in vs[:5]:
            assert (idx.slab_index(a) == idx.slab_index(c)) == (re.slab_index(a) == re.slab_index(c))


def test_tilted_volume_examples():
    x = TREE.root
    p = TREE.parent(x)
    assert tilted_volume(TREE, [x], x, 0.7) == 1
    assert tilted_volume(TREE, [x, p], x, 1.0) == pytest.approx(3.0)
    assert tilted_volume(TREE, [x, p], x, 0.5) == pytest.approx(1 + math.sqrt(2))


def _nk_kernel(g, k):
    def kern(x, y):
        s = g.n_level_set(x, k)
        return Fraction(1, len(s)) if y in s else 0
    return kern


def test_tmtp_level_sets():
    res = tmtp_check(TREE, _nk_kernel(TREE, 3), 3)
    assert res.lhs == 1 and res.rhs == 1 and res.gap == 0 and not res.flagged


def test_tmtp_zero_kernel():
    res = tmtp_check(TREE, lambda x, y: 0, 2)
    assert (res.lhs, res.rhs, res.gap) == (0, 0, 0)


@pytest.mark.parametrize("desc", [{"family": "tree", "b": 3}, {"family": "grandparent", "b": 2},
                                  {"family": "dl", "q": 3, "r": 2}])
def test_tmtp_adjacency(desc):
    g = make_family(desc)
    res = tmtp_check(g, lambda x, y: int(y in {w for w, _ in g.neighbors(x)}), 1)
    assert res.lhs == g.degree and res.rhs == g.degree and not res.flagged


def test_tmtp_flags_kernel_reaching_past_radius():
    res = tmtp_check(TREE, _nk_kernel(TREE, 2), 1)
    assert res.flagged
