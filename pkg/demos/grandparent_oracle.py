"""Exact computations on finite pieces of the grandparent graph.

Self-avoiding paths from v0 to its parent v1 are enumerated, each gets its
loop-erased random walk probability from Green functions, and the
probabilities add up to one.  Effective resistance to the parent and
grandparent stays below (b+4)/(b^2+4b+8).

    python demos/grandparent_oracle.py
"""

import numpy as np

from usflab import make_family, oracle

ex = oracle.grandparent_exhaustion(2, 3)
fg = ex.graph
total = 0.0
for k in range(1, fg.n):
    paths = oracle.enumerate_sap(fg, ex.v0, ex.v1, k, max_k=fg.n)
    mass = sum(oracle.lerw_path_probability(fg, ex.v0, {ex.v1}, p) for p in paths)
    total += mass
    if paths:
        print(f"k={k}: {len(paths):3d} paths, LERW mass {mass:.6f}")
print(f"total LERW mass on G_3: {total:.12f}")

big = oracle.grandparent_exhaustion(2, 8)
for k in (2, 4, 6):
    count = len(oracle.enumerate_sap(big.graph, big.v0, big.v1, k))
    print(f"paths of length {k} on G_8: enumerated {count}, "
          f"closed form {oracle.closed_form_path_count(2, k, 8)}")

gp = make_family(family="grandparent", b=2)
g6 = oracle.grandparent_exhaustion(2, 6)
grandparent = g6.graph.index[gp.parent(gp.parent(gp.root))]
r = oracle.effective_resistance(g6.graph, g6.v0, {g6.v1, grandparent})
print(f"R(v0 <-> parent and grandparent) on G_6 = {r:.6f}, bound {oracle.local_resistance_bound(2):.6f}")

tail = oracle.fusf_distance_tail(2, 6, 6, 3000, np.random.default_rng(2))
print("UST distance between v0 and v1 on G_6: " +
      ", ".join(f"P[d>={k}]={r.estimate:.4f}" for k, r in zip(tail.ks, tail.reports)))
