"""
Lifted bodies: volume and sampling
==================================

The integral of w over a polytope P is the volume of the lifted body
{(x, d) : x in P, 0 <= d <= w(x)}.  Rejection from its bounding box gives
the volume, and hit-and-run on it gives points whose x-marginal has
density proportional to w.
"""
import numpy as np
from scipy import stats

from dnfwmi import LiftedBody, Polytope, PolyWeight, mc_volume
from dnfwmi.volume import stopping_threshold
from dnfwmi.sampler import WalkConfig, hit_and_run_many

# triangle x + y <= 10 in the first quadrant, constant weight: area 50
tri = Polytope([[1, 1], [-1, 0], [0, -1]], [10, 0, 0])
body = LiftedBody(tri, PolyWeight.constant(1.0))
print("stopping threshold for (0.05, 0.05):", stopping_threshold(0.05, 0.05))
for seed in range(3):
    est = mc_volume(body, 0.05, 0.05, rng=seed)
    print(f"  seed {seed}: {est.value:.3f} after {est.diagnostics['draws']} draws")

# weight x on [0, 5]: integral 12.5, marginal density 2x / 25
seg = LiftedBody(Polytope([[1], [-1]], [5, 0]), PolyWeight([(1.0, {0: 1})]))
print("\nlinear lift:", round(mc_volume(seg, 0.05, 0.05, rng=0).value, 3), "(exact 12.5)")

xs = hit_and_run_many(seg, [2.5, 1.0], WalkConfig(steps=500), runs=5000, rng=0)[:, 0]
observed, edges = np.histogram(xs, bins=10, range=(0, 5))
expected = 5000 * np.diff(edges**2) / 25
print("bin   observed  expected")
for lo, o, e in zip(edges[:-1], observed, expected):
    print(f"{lo:3.1f}   {o:8d}  {e:8.1f}")
print("chi-square p-value:", round(stats.chisquare(observed, expected).pvalue, 3))
