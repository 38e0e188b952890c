"""Random slabs and the tilted mass-transport principle.

A random offset U cuts the levels into slabs.  Seen from x with offset 1-U
the same partition is reflected.  Transport checks compare mass sent out of
the root with mass received, weighted by the modular function.

    python demos/slabs_and_transport.py
"""

from fractions import Fraction

import numpy as np

from usflab import LevelIndexer, make_family, tmtp_check

g = make_family(family="grandparent", b=2)
rng = np.random.default_rng(5)
v = g.root
idx = LevelIndexer.draw(g, v, rng)
print(f"offset U = {float(idx.offset):.6f}")
for _ in range(5):
    x = g.random_vertex(rng, steps=6)
    n = idx.slab_index(x)
    print(f"  level {g.level(x):+d}: slab {n:+d}; reflected slab of v seen from x: "
          f"{idx.reflected(x).slab_index(v):+d}")


def nk(k):
    def kern(x, y):
        s = g.n_level_set(x, k)
        return Fraction(1, len(s)) if y in s else 0
    return kern


for k in (1, 2):
    res = tmtp_check(g, nk(k), k)
    print(f"uniform mass on N_{k}: sent {res.lhs}, received {res.rhs}")
res = tmtp_check(g, lambda x, y: int(y in {w for w, _ in g.neighbors(x)}), 1)
print(f"adjacency kernel: sent {res.lhs}, received {res.rhs} (degree {g.degree})")
