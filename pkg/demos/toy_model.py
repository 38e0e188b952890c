"""The toy model: exact samplers and closed forms on the (b+1)-regular tree.

    python demos/toy_model.py
"""

import numpy as np

from usflab import toy
from usflab.estimators import ks_distance

b = 2
rng = np.random.default_rng(7)
batch = toy.sample_toy_components(b, -40, 100_000, rng)

print("two-point function: P[x and its n-th ancestor share a tree]")
for n in range(5):
    mc = np.mean(batch.peak + batch.chain >= n)
    print(f"  n={n}: exact {float(toy.two_point_exact(b, n)):.5f}  MC {mc:.5f}")

print("mean number of vertices of T_x at level n")
for n in (2, 0, -5, -20, -40):
    print(f"  n={n:+3d}: exact {toy.first_moment_exact(b, n):7.4f}  MC {batch.at(n).mean():7.4f}")

print("x-rooted cluster: P[reaches level n] = b^-n")
vc = toy.sample_toy_vclusters(b, -1, 100_000, rng)
for n in (1, 2, 3):
    print(f"  n={n}: {vc.reaches(n).mean():.4f} vs {b ** -n:.4f}")

deep = toy.sample_toy_components(b, -300, 10_000, rng).at(-300) / 300
print(f"|T_x at level -300| / 300 against its Gamma limit: KS = {ks_distance(deep, toy.gamma_limit_cdf(b)):.4f}")

z = toy.gw_final(b, 500, 200_000, rng)
print(f"critical GW: 500 P[Z_500 > 0] = {500 * np.mean(z > 0):.3f} (limit {toy.kolmogorov_constant(b)})")
