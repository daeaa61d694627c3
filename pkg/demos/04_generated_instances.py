"""
Generated benchmarks
====================

Random hybrid DNFs: k = floor((m + n + 20) / W) clauses, every variable
used at least once, each clause satisfiable at a hidden anchor, and a
concave polynomial weight shifted to stay positive on the box.
"""
import tempfile
import time
from pathlib import Path

from dnfwmi import GenConfig, approx_wmi, brute_force_wmi, gen_instance, read_instance, \
    write_instance

cfg = GenConfig(m_bools=4, n_reals=2, width=6, seed=11)
phi, w, anchors = gen_instance(cfg)
print(f"m={phi.m_bools} n={phi.n_reals} k={phi.k} widths={[c.width for c in phi.clauses]}")
print("weight terms:", w.wx.terms)
print("anchors satisfy their clauses:",
      all(c.reals_hold(a) for c, a in zip(phi.clauses, anchors)))

# instances are plain JSON
path = Path(tempfile.mkdtemp()) / "inst.json"
write_instance(path, phi, w)
phi, w = read_instance(path)
print("wrote and reloaded", path.name, f"({path.stat().st_size} bytes)")

truth = brute_force_wmi(phi, w, grid_resolution=1000)
start = time.monotonic()
report = approx_wmi(phi, w, 0.15, 0.1, seed=0, walk_steps=1000)
print(f"\nbrute force {truth:.2f}  estimate {report.value:.2f}  "
      f"({time.monotonic() - start:.1f}s, T = {report.budget.T})")

# narrower clauses mean more of them, and a larger T
for width in (3, 13):
    phi, w, _ = gen_instance(GenConfig(10, 10, width, seed=0))
    start = time.monotonic()
    report = approx_wmi(phi, w, 0.35, 0.25, seed=0, walk_steps=1000)
    print(f"W={width:>2}: k={phi.k:>2}  T={report.budget.T:>6}  "
          f"{time.monotonic() - start:.1f}s")
