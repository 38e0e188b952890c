"""From a percolation cluster on the base graph to a branching random walk.

Each particle's children are the other vertices of its truncated cluster,
displaced by their level.  Biggins' conditions at alpha = -1 decide whether
the additive martingale has a nondegenerate limit.

    python demos/branching_random_walk.py
"""

import numpy as np

from usflab import brw, make_family

tree = make_family(family="tree", b=2)
rng = np.random.default_rng(4)

for base in (brw.AllEdges(tree, 1), brw.AllEdges(tree, 2), brw.BernoulliBonds(tree, 2, 0.7)):
    s = brw.summarize_base(base, 20_000, rng)
    verdict = brw.biggins_check(s.lam.estimate, s.lam_prime.estimate, -1)
    print(f"{base.describe()}")
    print(f"  lambda(-1) = {s.lam.estimate:.4f} +- {s.lam.se:.4f}, "
          f"lambda'(-1) = {s.lam_prime.estimate:.4f} +- {s.lam_prime.se:.4f}")
    print(f"  conditions: {verdict}")

law = brw.OffspringLaw(brw.BernoulliBonds(tree, 1, 0.7))
lam = law.base.exact_lambda(-1)
trace = brw.brw_weight_growth(law, -1, 8, rng, lam)
fit = brw.growth_slope(trace)
print(f"population by generation: {trace.population}")
print(f"growth slope of the total weight {fit.slope:.4f} vs log lambda {np.log(lam):.4f}")

fp = make_family(family="free_product", base=tree.descriptor())
gens = brw.free_product_generations(fp, brw.BernoulliBonds(tree, 1, 0.7), 4, rng)
print(f"free product cluster, copies per switch generation: {[len(x) for x in gens]}")
