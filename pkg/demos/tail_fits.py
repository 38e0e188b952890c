"""Scaling fits for heavy and stretched-exponential tails.

    python demos/tail_fits.py
"""

import numpy as np

from usflab import toy
from usflab.estimators import scaling_fit, stretched_tail_models

rng = np.random.default_rng(6)
sizes = toy.sample_vcluster_sizes(2, 200_000, rng)
rs = np.array([10, 30, 100, 300, 1000])
tail = np.array([np.mean(sizes >= r) for r in rs])
fit = scaling_fit(rs, tail, "power")
print(f"P[|cluster| >= R] ~ R^{fit.slope:.3f}   exact tail at R=1000: "
      f"{toy.vcluster_size_tail_exact(2, [1000])[0]:.5f}, MC {tail[-1]:.5f}")

ks = np.arange(4, 101)
exact = toy.vcluster_level0_tail_exact(2, ks)
fits = stretched_tail_models(ks, exact)
for name, f in sorted(fits.items(), key=lambda kv: kv[1].residual):
    print(f"-log P[cluster has >= k vertices at level 0] against {name:6s}: residual {f.residual:.3e}")
