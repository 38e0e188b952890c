"""Wilson's algorithm rooted at infinity on a lazily generated graph.

Walks that fall a fixed number of slabs below the explored region count as
escaped.  The explorer grows only the tree of x, and rooting x gives the
x-rooted forest.  On finite graphs the same algorithm samples uniform
spanning trees.

    python demos/wilson_forest.py
"""

from collections import Counter

import numpy as np

from usflab import (FiniteGraph, explore_component, make_family, sample_ust_finite, sample_wusf_region)
from usflab.forest import level_window

rng = np.random.default_rng(9)
g = make_family(family="grandparent", b=2)
region = list(g.ball(g.root, 2).vertices)
f = sample_wusf_region(g, region, horizon=10, rng=rng)
trees = Counter(f.component[v] for v in region)
print(f"{len(region)} vertices of a radius-2 ball fall into {len(trees)} trees; "
      f"{f.walks} walks, {f.steps} steps")

tree = make_family(family="tree", b=2)
x = tree.root
for rooted in (False, True):
    sizes = []
    for _ in range(300):
        _, members = explore_component(tree, x, level_window(tree, x, -4, 4), horizon=10,
                                       rng=rng, rooted=rooted)
        sizes.append(len(members))
    kind = "x-rooted" if rooted else "wired"
    print(f"{kind} forest: mean size of x's tree within 4 levels = {np.mean(sizes):.2f}")

k4 = FiniteGraph.from_edges(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
counts = Counter(sample_ust_finite(k4, 0, rng=rng).edges() for _ in range(16_000))
print(f"K4: {len(counts)} distinct spanning trees, frequencies "
      f"{min(counts.values())}..{max(counts.values())} (1000 expected each)")
