import numpy as np
import pytest
from scipy import stats

from usflab.forest import (INFINITY, OrientedForest, explore_component, level_window,
                           sample_ust_finite, sample_vwusf_component, sample_wusf_region, wilson_branch)
from usflab.graphs import FiniteGraph, make_family
from usflab.oracle import grandparent_exhaustion, spanning_tree_count
from usflab.rng import Uniforms
from usflab.walk import loop_erase

TREE = make_family(family="tree", b=2)


def test_single_vertex_region_is_escape_path(rng):
    x = TREE.root
    f = sample_wusf_region(TREE, [x], horizon=6, rng=rng)
    fut = f.future(x)
    assert f.parent[fut[-1]] == INFINITY
    assert len(f) == len(fut)
    assert loop_erase(fut) == fut
    assert TREE.level(fut[-1]) <= TREE.level(x) - 6
    f.check()


def test_forest_is_acyclic_and_covers_region(rng):
    g = make_family(family="grandparent", b=2)
    region = list(g.ball(g.root, 2).vertices)
    f = sample_wusf_region(g, region, horizon=8, rng=rng)
    assert all(v in f for v in region)
    f.check()
    for a, b in f.edges():
        assert b in {w for w, _ in g.neighbors(a)}


def test_wilson_branch_stops_on_forest():
    f = OrientedForest()
    f.add_root(TREE.root)
    child = next(w for w, s in TREE.neighbors(TREE.root) if s == -1)
    draws = Uniforms(np.random.default_rng(1))
    ends = set()
    for _ in range(50):
        path, out = wilson_branch(TREE, f, child, -30, draws)
        assert path[0] == child and loop_erase(path) == path
        if out:
            assert TREE.level(path[-1]) <= -30 and TREE.root not in path
        else:
            assert path[-1] == TREE.root
        ends.add(out)
    assert ends == {True, False}


def test_rooted_component_contains_root(rng):
    x = TREE.root
    forest, members = sample_vwusf_component(TREE, x, level_window(TREE, x, -6, 6), horizon=6, rng=rng)
    assert x in members
    assert forest.parent[x] is None
    assert all(forest.connected(x, v) for v in members)


def test_component_reach_matches_toy_law(rng):
    # in the x-rooted forest on the tree, P[component reaches level +1] = 1/b
    n, hits = 3000, 0
    x = TREE.root
    for _ in range(n):
        _, members = explore_component(TREE, x, level_window(TREE, x, -3, 1), horizon=10, rng=rng,
                                       rooted=True)
        hits += any(TREE.level(v) == 1 for v in members)
    assert abs(hits / n - 0.5) <= 4 * np.sqrt(0.25 / n)


def test_forest_json(rng):
    f = sample_wusf_region(TREE, [TREE.root], horizon=3, rng=rng)
    assert '"infinity"' in f.to_json()


def _tree_frequencies(fg, samples, rng):
    draws = Uniforms(rng)
    counts = {}
    for _ in range(samples):
        t = sample_ust_finite(fg, 0, draws=draws).edges()
        counts[t] = counts.get(t, 0) + 1
    return counts


@pytest.mark.parametrize("name, fg", [
    ("triangle", FiniteGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])),
    ("4-cycle", FiniteGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])),
    ("grandparent G_1", grandparent_exhaustion(2, 1).graph),
])
def test_ust_uniform(name, fg, rng):
    n = 30000
    counts = _tree_frequencies(fg, n, rng)
    assert len(counts) == spanning_tree_count(fg)
    obs = np.array(list(counts.values()))
    assert stats.chisquare(obs).pvalue > 1e-3
    p = 1 / len(counts)
    assert np.all(np.abs(obs / n - p) <= 4 * np.sqrt(p * (1 - p) / n))


def test_ust_root_independent(rng):
    fg = FiniteGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
    a = _tree_frequencies(fg, 8000, rng)
    draws = Uniforms(rng)
    b = {}
    for _ in range(8000):
        t = sample_ust_finite(fg, 3, draws=draws, order=[1, 0, 2]).edges()
        b[t] = b.get(t, 0) + 1
    keys = sorted(set(a) | set(b), key=sorted)
    table = np.array([[a.get(k, 0) for k in keys], [b.get(k, 0) for k in keys]])
    assert stats.chi2_contingency(table).pvalue > 1e-3


def test_ust_rejects_disconnected():
    with pytest.raises(ValueError):
        sample_ust_finite(FiniteGraph.from_edges(3, [(0, 1)]), 0, rng=np.random.default_rng(0))


def _rate(hits, n, p):
    return abs(hits / n - p) <= 4 * np.sqrt(p * (1 - p) / n)


def test_parent_in_future(rng):
    x, par = TREE.root, TREE.parent(TREE.root)
    draws = Uniforms(rng)
    n = 20_000
    hits = sum(par in sample_wusf_region(TREE, [x], horizon=10, draws=draws).future(x) for _ in range(n))
    assert _rate(hits, n, 1 / 3)


def test_rooted_singleton_probability(rng):
    x = TREE.root
    win = level_window(TREE, x, -1, 1)
    draws = Uniforms(rng)
    n = 20_000
    hits = sum(sample_vwusf_component(TREE, x, win, horizon=10, draws=draws)[1] == {x} for _ in range(n))
    assert _rate(hits, n, 1 / 8)


def test_future_and_past_basics(rng):
    f = sample_wusf_region(TREE, [TREE.root], horizon=4, rng=rng)
    fut = f.future(TREE.root)
    assert fut[0] == TREE.root
    assert f.past(TREE.root) == {TREE.root}  # nothing explored points into x
    assert f.past(fut[-1]) == set(fut)


def test_ordering_invariance(rng):
    x, par = TREE.root, TREE.parent(TREE.root)
    sib = next(w for w, s in TREE.neighbors(par) if s == -1 and w != x)
    draws = Uniforms(rng)
    n = 10_000
    a = sum(sample_wusf_region(TREE, [x, sib, par], horizon=10, draws=draws).connected(x, par) for _ in range(n))
    c = sum(sample_wusf_region(TREE, [par, sib, x], horizon=10, draws=draws).connected(x, par) for _ in range(n))
    pa, pc = a / n, c / n
    pool = (a + c) / (2 * n)
    assert abs(pa - pc) <= 4 * np.sqrt(2 * pool * (1 - pool) / n)


def test_past_level_means_flat(rng):
    x = TREE.root
    win = level_window(TREE, x, -5)
    draws = Uniforms(rng)
    counts = np.zeros(5)
    n = 1500
    for _ in range(n):
        f, members = explore_component(TREE, x, win, horizon=10, draws=draws)
        past = f.past(x) & members
        for v in past:
            d = TREE.level(x) - TREE.level(v)
            if 1 <= d <= 5:
                counts[d - 1] += 1
    means = counts / n
    assert means.max() / means.min() < 1.25


def test_past_dominated_by_rooted_cluster(rng):
    # the past of x is stochastically smaller than the x-rooted cluster, tested on {size >= k}
    x = TREE.root
    win = level_window(TREE, x, -4, 4)
    draws = Uniforms(rng)
    n = 1500
    past, rooted = [], []
    for _ in range(n):
        f, members = explore_component(TREE, x, win, horizon=10, draws=draws)
        past.append(len(f.past(x) & members))
        rooted.append(len(sample_vwusf_component(TREE, x, win, horizon=10, draws=draws)[1]))
    past, rooted = np.array(past), np.array(rooted)
    for k in (2, 4, 8):
        p1, p2 = np.mean(past >= k), np.mean(rooted >= k)
        assert p1 <= p2 + 4 * np.sqrt((p1 * (1 - p1) + p2 * (1 - p2)) / n)
