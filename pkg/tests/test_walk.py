import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from usflab.graphs import make_family
from usflab.walk import (WalkPath, drift_exact, drift_moment, escaped, log_drift_exact, loop_erase,
                         post_escape_return_rate, slab_visit_stats, walk)

TREE = make_family(family="tree", b=2)


def test_walk_stopping_immediately():
    path = walk(TREE, TREE.root, lambda v, lvl, t: True, rng=np.random.default_rng(0))
    assert path.steps == 0 and not path.cap_hit


def test_walk_cap():
    path = walk(TREE, TREE.root, lambda v, lvl, t: False, cap=50, rng=np.random.default_rng(0))
    assert path.steps == 50 and path.cap_hit
    assert all(abs(a - b) == 1 for a, b in zip(path.levels, path.levels[1:]))


def test_hitting_parent_probability(rng):
    par = TREE.parent(TREE.root)
    n, hits = 4000, 0
    for _ in range(n):
        p = walk(TREE, TREE.root, lambda v, lvl, t: v == par or lvl <= -25, rng=rng)
        hits += p.vertices[-1] == par
    est = hits / n
    assert abs(est - 0.5) <= 4 * math.sqrt(0.25 / n)


def test_per_step_log_drift(rng):
    # walks stopped at their first return to the start level
    total, steps = 0.0, 0
    for _ in range(2000):
        p = walk(TREE, TREE.root, lambda v, lvl, t: t > 0 and lvl == 0 or t >= 200, rng=rng)
        total += p.levels[-1]
        steps += p.steps
    assert log_drift_exact(TREE) == pytest.approx(-math.log(2) / 3)
    assert total * TREE.kappa / steps == pytest.approx(-math.log(2) / 3, rel=0.1)


@pytest.mark.parametrize("path, erased", [
    (list("abac"), list("ac")),
    (list("abcbd"), list("abd")),
    (list("abcd"), list("abcd")),
    (list("abcabca"), list("a")),
])
def test_loop_erase_examples(path, erased):
    assert loop_erase(path) == erased


@given(st.lists(st.integers(0, 6), min_size=1, max_size=60))
def test_loop_erase_properties(path):
    out = loop_erase(path)
    assert len(set(out)) == len(out)
    assert out[0] == path[0] and out[-1] == path[-1]
    assert loop_erase(out) == out
    it = iter(path)
    assert all(v in it for v in out)  # subsequence


def test_loop_erase_keeps_levels():
    wp = WalkPath(list("abac"), [0, -1, 0, 1])
    out = loop_erase(wp)
    assert out.vertices == ["a", "c"] and out.levels == [0, 1]


def test_escape_rule():
    assert not escaped(0, 0, 5)
    assert escaped(-6, 0, 5)
    assert escaped(-10, 0, 5, t0_units=2)
    assert not escaped(-9, 0, 5, t0_units=2)
    with pytest.raises(ValueError):
        escaped(0, 0, 0)


def test_drift_exact_values():
    assert drift_exact(TREE, 1.0) == pytest.approx(1.0)
    assert drift_exact(TREE, 0.5) == pytest.approx(2 * math.sqrt(2) / 3)
    assert drift_exact(TREE, 2.0) == pytest.approx(1.5)


def test_drift_identity_every_family():
    for desc in ({"family": "grandparent", "b": 3}, {"family": "dl", "q": 5, "r": 2},
                 {"family": "free_product", "base": {"family": "tree", "b": 4}}):
        assert drift_exact(make_family(desc), 1.0) == pytest.approx(1.0)


def test_drift_moment_mc(rng):
    rep = drift_moment(TREE, 0.5, 20000, rng)
    assert rep.within()


def test_slab_visits_start_counts(rng):
    stats = slab_visit_stats(TREE, 0, 2000, 200, rng)
    assert stats.occupation.estimate >= 1


def test_post_escape_return_rate(rng):
    rep = post_escape_return_rate(TREE, 4, 20000, 400, rng)
    assert abs(rep.estimate - 2.0**-4) <= 4 * rep.se
