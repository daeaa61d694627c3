"""
Weighted model counting on Boolean DNFs
=======================================

With no real variables the problem reduces to weighted counting, and the
coverage estimator is the classic Karp-Luby-Madras scheme.
"""
import numpy as np

from dnfwmi import BoolDnf, brute_force_wmc, klm_wmc
from dnfwmi.generator import GenConfig, gen_boolean_instance
from dnfwmi.klm import klm_trials

phi = BoolDnf.from_lits(4, [[(0, True), (1, False)], [(1, True), (2, True)], [(3, False)]])
wb = np.array([0.3, 0.6, 0.5, 0.8])
exact = brute_force_wmc(phi, wb)
est = klm_wmc(phi, wb, 0.05, 0.05, seed=0)
print(f"exact {exact:.4f}  estimate {est.value:.4f}  trials {est.diagnostics['trials']}")

# a larger generated skeleton; enumeration is still affordable at m = 20
phi = gen_boolean_instance(GenConfig(20, 0, 4, seed=3))
wb = np.full(20, 0.5)
exact = brute_force_wmc(phi, wb)
print(f"\n{phi.k} clauses over 20 variables, exact count {exact:.5f}")
for eps in (0.3, 0.1, 0.05):
    est = klm_wmc(phi, wb, eps, 0.05, seed=1)
    err = abs(est.value - exact) / exact
    print(f"eps {eps:<4}  T {klm_trials(eps, 0.05, phi.k):>7}  estimate {est.value:.5f}  "
          f"relative error {err:.4f}")
