"""Tour of the four graph families and their modular function steps,
checking the per-vertex identity sum_w Delta(v, w) = deg(v).

    python demos/graph_families.py
"""

import numpy as np

from usflab import make_family

families = [
    {"family": "tree", "b": 2},
    {"family": "grandparent", "b": 3},
    {"family": "dl", "q": 3, "r": 2},
    {"family": "free_product", "base": {"family": "tree", "b": 2}},
]

rng = np.random.default_rng(1)
for desc in families:
    g = make_family(desc)
    v = g.random_vertex(rng, steps=30)
    print(f"{g!r}")
    print(f"  degree {g.degree}, quantum log({g.kappa_base}), slab width {g.t0_units} quanta")
    print(f"  level steps from any vertex: {g.step_histogram()}")
    print(f"  sum of Delta over the neighbors of a random vertex: {g.delta_sum(v)}")

# level sets: vertices reached by |k| steps that all move the level the same way
tree = make_family(family="tree", b=2)
for k in (1, 2, 3):
    up, down = tree.n_level_set(tree.root, k), tree.n_level_set(tree.root, -k)
    print(f"k={k}: {len(up)} vertex above, {len(down)} below (ratio {len(down) // len(up)} = 2^{k})")
