"""Simple random walk pushes the modular function down.

E[Delta(X0, X1)^lam] equals 1 at lam = 1 and is below 1 in between, so the
walk drifts to lower levels and visits each slab a bounded number of times.

    python demos/random_walk_drift.py
"""

import numpy as np

from usflab import make_family
from usflab.walk import drift_exact, drift_moment, log_drift_exact, slab_visit_stats

rng = np.random.default_rng(3)
for desc in ({"family": "tree", "b": 2}, {"family": "dl", "q": 3, "r": 2}):
    g = make_family(desc)
    print(g)
    for lam in (0.25, 0.5, 1.0, 2.0):
        mc = drift_moment(g, lam, 50_000, rng)
        print(f"  E[Delta^{lam}] exact {drift_exact(g, lam):.5f}  MC {mc.estimate:.5f} +- {mc.se:.5f}")
    print(f"  mean log Delta per step {log_drift_exact(g):.5f}")

tree = make_family(family="tree", b=2)
print("slab occupation for SRW on the tree (b=2):")
for n in (5, 10, 20):
    st = slab_visit_stats(tree, n, 20_000, 400, rng)
    print(f"  n={n:2d}: visits {st.occupation.estimate:.3f}, "
          f"time-weighted visits / n {st.weighted_time.estimate / n:.3f}")
