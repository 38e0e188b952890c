import math

import numpy as np
import pytest

from usflab import oracle
from usflab.graphs import FiniteGraph, make_family
from usflab.rng import Uniforms

EDGE = FiniteGraph.from_edges(2, [(0, 1)])
DOUBLE = FiniteGraph.from_edges(2, [(0, 1), (0, 1)])
TRIANGLE = FiniteGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
SQUARE = FiniteGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
K4 = FiniteGraph.from_edges(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])


def path_graph(n):
    return FiniteGraph.from_edges(n + 1, [(i, i + 1) for i in range(n)])


def test_green_immediate_absorption():
    star = FiniteGraph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    assert oracle.green(star, 0, {1, 2, 3}) == pytest.approx(1)


@pytest.mark.parametrize("x", [1, 2, 5])
def test_green_on_path(x):
    n = 7
    # G(x, {0, n}) = deg(x) R(x <-> {0, n}) with R = x(n-x)/n
    assert oracle.green(path_graph(n), x, {0, n}) == pytest.approx(2 * x * (n - x) / n)


def test_resistance_examples():
    assert oracle.effective_resistance(EDGE, 0, {1}) == pytest.approx(1)
    assert oracle.effective_resistance(DOUBLE, 0, {1}) == pytest.approx(0.5)
    assert oracle.effective_resistance(path_graph(5), 0, {5}) == pytest.approx(5)


def test_resistance_green_duality():
    fg = make_family(family="grandparent", b=2).ball(make_family(family="grandparent", b=2).root, 2)
    r = oracle.effective_resistance(fg, 0, {1, 2})
    assert oracle.escape_transform(fg, 0, {1, 2}) == pytest.approx(r, abs=1e-12)


def test_resistance_sparse_path_agrees_with_dense(monkeypatch):
    ex = oracle.grandparent_exhaustion(2, 4)
    dense = oracle.effective_resistance(ex.graph, ex.v0, {ex.v1})
    monkeypatch.setattr(oracle, "DENSE_LIMIT", 5)
    assert oracle.effective_resistance(ex.graph, ex.v0, {ex.v1}) == pytest.approx(dense, rel=1e-9)
    assert oracle.green(ex.graph, ex.v0, {ex.v1}) == pytest.approx(dense * ex.graph.degree(ex.v0), rel=1e-9)


def test_lerw_single_edge():
    assert oracle.lerw_path_probability(EDGE, 0, {1}, [0, 1]) == pytest.approx(1)


def test_lerw_path_rejects_bad_input():
    with pytest.raises(ValueError):
        oracle.lerw_path_probability(SQUARE, 0, {2}, [0, 2])
    with pytest.raises(ValueError):
        oracle.lerw_path_probability(SQUARE, 0, {2}, [0, 1, 0, 1, 2])


def _all_paths(ex):
    return [p for k in range(1, ex.graph.n) for p in oracle.enumerate_sap(ex.graph, ex.v0, ex.v1, k, max_k=99)]


def test_lerw_totality_on_g3():
    ex = oracle.grandparent_exhaustion(2, 3)
    total = sum(oracle.lerw_path_probability(ex.graph, ex.v0, {ex.v1}, p) for p in _all_paths(ex))
    assert total == pytest.approx(1, abs=1e-9)


def test_lerw_frequencies_match_green_formula(rng):
    ex = oracle.grandparent_exhaustion(2, 3)
    runs = 40_000
    freq = oracle.lerw_path_frequencies(ex.graph, ex.v0, {ex.v1}, runs, rng)
    for p in oracle.enumerate_sap(ex.graph, ex.v0, ex.v1, 2) + [[ex.v0, ex.v1]]:
        mu = oracle.lerw_path_probability(ex.graph, ex.v0, {ex.v1}, p)
        est = freq.get(tuple(p), 0) / runs
        assert abs(est - mu) <= 4 * math.sqrt(mu * (1 - mu) / runs)


def test_sap_counts():
    ex = oracle.grandparent_exhaustion(2, 5)
    assert len(oracle.enumerate_sap(ex.graph, ex.v0, ex.v1, 1)) == 1
    assert len(oracle.enumerate_sap(ex.graph, ex.v0, ex.v1, 2)) == 3
    small = oracle.grandparent_exhaustion(2, 3)
    assert oracle.enumerate_sap(small.graph, small.v0, small.v1, 5) == []
    with pytest.raises(ValueError):
        oracle.enumerate_sap(ex.graph, ex.v0, ex.v1, 40)


def test_sap_paths_are_self_avoiding():
    ex = oracle.grandparent_exhaustion(2, 4)
    for p in oracle.enumerate_sap(ex.graph, ex.v0, ex.v1, 4):
        assert len(set(p)) == 5 and p[0] == ex.v0 and p[-1] == ex.v1
        assert all(b in ex.graph.adj[a] for a, b in zip(p, p[1:]))


@pytest.mark.parametrize("b", [2, 3])
def test_closed_form_offset(b):
    # enumeration is the reference; the closed form falls short by b - 1
    ex = oracle.grandparent_exhaustion(b, 8)
    for k in (4, 6):
        if b == 3 and k == 6:
            continue
        count = len(oracle.enumerate_sap(ex.graph, ex.v0, ex.v1, k))
        assert count - oracle.closed_form_path_count(b, k, 8) == b - 1


def test_path_count_growth():
    ex = oracle.grandparent_exhaustion(2, 10)
    c4 = len(oracle.enumerate_sap(ex.graph, ex.v0, ex.v1, 4))
    c6 = len(oracle.enumerate_sap(ex.graph, ex.v0, ex.v1, 6))
    assert 2 <= c6 / c4 <= 8


def test_spanning_tree_counts():
    assert oracle.spanning_tree_count(TRIANGLE) == 3
    assert oracle.spanning_tree_count(SQUARE) == 4
    assert oracle.spanning_tree_count(K4) == 16
    assert oracle.spanning_tree_count(FiniteGraph.from_edges(3, [(0, 1)])) == 0


def test_local_resistance_bound():
    assert oracle.local_resistance_bound(2) == pytest.approx(0.3)


def test_hitting_time_on_path():
    assert oracle.expected_hitting_time(path_graph(4), 0, {4}) == pytest.approx(16)


def test_fusf_distance_tail_shape(rng):
    tail = oracle.fusf_distance_tail(2, 5, 6, 800, rng)
    probs = [r.estimate for r in tail.reports]
    assert probs[0] == 1
    assert all(a >= c for a, c in zip(probs, probs[1:]))
    assert tail.distances.min() >= 1
