"""
Weights that depend on Booleans
===============================

Here w(x) = x when v holds and 2x otherwise, on x in [0, 1], with
Pr(v) = 1/2.  The answer is (1/2)(1/2) + (1/2)(1) = 0.75.  The ratio of
the two clause integrals is rho = 2, which sets how many Boolean rounds
the clause-weight step averages.
"""
from dnfwmi import approx_wmi_dep, brute_force_wmi
from dnfwmi.verify import dep_instance
from dnfwmi.volume import dep_parameters

phi, w = dep_instance()
print("brute force:", round(brute_force_wmi(phi, w, grid_resolution=1000), 4))

params = dep_parameters(0.2, 0.1, w.wx.rho)
print(f"standalone (0.2, 0.1): rounds s = {params['rounds']}, per-call eps = {params['eps_comp']:.4f}")

# inside the estimator the clause weight runs at eps_V = eps^2 / 47k, so s is far larger

for seed in range(5):
    report = approx_wmi_dep(phi, w, 0.2, 0.2, oracle="exact-box", seed=seed)
    diag = report.per_clause[0].diagnostics
    print(f"seed {seed}: {report.value:.6f}  rounds {diag['rounds']}  "
          f"distinct patterns {diag['distinct_patterns']}")
