"""Acceptance checks against independent oracles.

:data:`CRITERIA` maps each criterion number to a check returning
``(passed, detail)``.  :func:`run_criterion` times one check and wraps it in
a :class:`CriterionResult`; :func:`run_suite` strings them together for the
``wmi verify`` command and the acceptance tests.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from .errors import WmiError
from .estimator import approx_wmi, approx_wmi_dep, brute_force_wmi, compute_budget
from .formula import Clause, HybridDnf, LraAtom
from .generator import DEFAULT_WIDTHS, GenConfig, gen_instance
from .geometry import LiftedBody, Polytope, member_many
from .klm import BoolDnf, brute_force_wmc, klm_wmc
from .sampler import WalkConfig, hit_and_run, hit_and_run_many
from .volume import dep_parameters, mc_volume
from .weights import ConditionedWeight, PolyWeight, WeightFunction, nonnegativity_probe


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number}. {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _atom(var, op, rhs, coef=1.0):
    return LraAtom({var: coef}, op, rhs)


def three_clause_instance() -> tuple[HybridDnf, WeightFunction]:
    """Three convex clauses over ``x1 in [0, 10]`` with ``w = x1``; WMI is 11.15."""
    clauses = [
        Clause([(0, True), (1, False)], [_atom(0, ">=", 0), _atom(0, "<=", 5)]),
        Clause([(1, True)], [_atom(0, "<", 2)]),
        Clause([(1, True)], [_atom(0, ">", 4)]),
    ]
    phi = HybridDnf(1, 2, [(0, 10)], clauses)
    return phi, WeightFunction([0.6, 0.1], PolyWeight([(1.0, {0: 1})]))


def dep_instance() -> tuple[HybridDnf, WeightFunction]:
    """``w = x`` if ``v`` else ``2x`` on ``[0, 1]`` with ``wb(v) = 0.5``; WMI is 0.75."""
    phi = HybridDnf(1, 1, [(0, 1)], [Clause([], [_atom(0, ">=", 0), _atom(0, "<=", 1)])])
    wx = ConditionedWeight((0,), {"1": PolyWeight([(1.0, {0: 1})]),
                                  "0": PolyWeight([(2.0, {0: 1})])}, rho=2.0)
    return phi, WeightFunction([0.5], wx)


def random_bool_dnf(rng, max_m=12, max_k=6):
    m = int(rng.integers(2, max_m + 1))
    k = int(rng.integers(1, max_k + 1))
    clauses = []
    for _ in range(k):
        size = int(rng.integers(1, min(4, m) + 1))
        vars_ = rng.choice(m, size=size, replace=False)
        clauses.append([(int(v), bool(rng.random() < 0.5)) for v in vars_])
    wb = np.round(rng.uniform(0.1, 0.9, size=m), 3)
    return BoolDnf.from_lits(m, clauses), wb


def small_hybrid(seed) -> tuple[HybridDnf, WeightFunction]:
    """Generated instance with ``m <= 8``, ``n <= 2`` and at most 4 clauses."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 3))
    m = int(rng.integers(2, 9))
    width = max(8, math.ceil((m + n + 20) / 4))
    return gen_instance(GenConfig(m, n, width, seed=seed))[:2]


def _timed(fn: Callable[..., tuple[bool, str]], number, name, *args, **kw) -> CriterionResult:
    start = time.monotonic()
    try:
        ok, detail = fn(*args, **kw)
    except WmiError as exc:
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CriterionResult(number, name, ok, detail, time.monotonic() - start)


def _three_clause(seed):
    phi, w = three_clause_instance()
    lo, hi = 11.15 * 0.9, 11.15 * 1.1
    inside, slowest = 0, 0.0
    for s in range(20):
        t = time.monotonic()
        r = approx_wmi(phi, w, 0.1, 0.05, "exact-box", seed=seed + s)
        slowest = max(slowest, time.monotonic() - t)
        inside += lo <= r.value <= hi
    return inside >= 18 and slowest < 10, f"{inside}/20 in [{lo:.3f}, {hi:.3f}], slowest run {slowest:.2f}s"


def _klm(seed):
    rng = np.random.default_rng(seed)
    start = time.monotonic()
    good = 0
    for r in range(50):
        phi, wb = random_bool_dnf(rng)
        exact = brute_force_wmc(phi, wb)
        est = klm_wmc(phi, wb, 0.1, 0.05, seed=seed * 1000 + r).value
        good += abs(est - exact) <= 0.1 * exact
    total = time.monotonic() - start
    return good >= 48 and total < 60, f"{good}/50 within 10%, {total:.1f}s"


def _volume_bodies():
    box = Polytope([[1, 0], [-1, 0], [0, 1], [0, -1]], [10, 0, 10, 0])
    tri = Polytope([[1, 1], [1, 0], [-1, 0], [0, 1], [0, -1]], [10, 10, 0, 10, 0])
    seg = Polytope([[1], [-1]], [5, 0])
    return [("box", LiftedBody(box, PolyWeight.constant(1.0)), 100.0),
            ("triangle", LiftedBody(tri, PolyWeight.constant(1.0)), 50.0),
            ("linear lift", LiftedBody(seg, PolyWeight([(1.0, {0: 1})])), 12.5)]


def _volume(seed):
    parts, ok = [], True
    for name, body, truth in _volume_bodies():
        good = sum(abs(mc_volume(body, 0.05, 0.05, rng=seed * 1000 + s).value - truth)
                   <= 0.05 * truth for s in range(100))
        ok &= good >= 95
        parts.append(f"{name} {good}/100")
    return ok, ", ".join(parts)


def _dep(seed):
    phi, w = dep_instance()
    good = sum(abs(approx_wmi_dep(phi, w, 0.2, 0.2, seed=seed + s).value - 0.75) <= 0.15
               for s in range(20))
    s_ref = math.ceil(math.log(2 / 0.05) * (1 + math.sqrt(2)) ** 2 / 0.2**2 * 2.0**2)
    s_got = dep_parameters(0.2, 0.1, 2.0)["rounds"]
    return good >= 16 and s_got == s_ref, f"{good}/20 within 20% of 0.75, s = {s_got} (expected {s_ref})"


def budget_sweep():
    """Grid of ``(eps, delta, k)`` used for the budget check."""
    eps = np.round(np.arange(0.1, 0.95, 0.1), 2)
    delta = np.round(np.arange(0.05, 0.55, 0.05), 2)
    ks = np.unique(np.round(np.logspace(0, 4, 30)).astype(int))
    return [(float(e), float(d), int(k)) for e in eps for d in delta for k in ks]


def budget_violations(eps, delta, k) -> list[str]:
    """Requirements on the default budget, recomputed from first principles."""
    b = compute_budget(eps, delta, k)
    log8 = math.log(8 / delta)
    out = []
    if b.eps_v > eps**2 / (47 * k) or b.eps_s > eps**2 / (47 * k):
        out.append("eps_v/eps_s")
    if b.eps_p > eps**2 / (47 * k**2):
        out.append("eps_p")
    if b.delta_v > delta / (4 * k):
        out.append("delta_v")
    if b.delta_s + b.delta_p > delta / (2276 * log8 * k / eps**2):
        out.append("delta_s")
    et = (eps - b.eps_v) / (1 + b.eps_v)
    ct = (1 + b.eps_s) * (1 + b.eps_v) * (1 + k * b.eps_p) / ((1 - b.eps_v) * (1 - b.eps_p))
    denom = et**2 - 8 * (ct - 1) * k
    if not denom > 0:
        out.append("denominator")
    elif b.T != math.ceil(8 * log8 * (1 + et) * k / denom):
        out.append("T formula")
    if not 1 <= b.T <= math.ceil(1138 * log8 * k / eps**2) + 1:
        out.append("T bound")
    return out


def _budget():
    grid = budget_sweep()
    bad = [(p, v) for p in grid for v in [budget_violations(*p)] if v]
    detail = f"{len(grid)} settings, {len(bad)} violating"
    if bad:
        detail += f" (first: {bad[0]})"
    return not bad, detail


def _generator(seed):
    bad = []
    for width in DEFAULT_WIDTHS:
        for s in range(100):
            size = (10, 25, 50)[s % 3]
            cfg = GenConfig(size, size, width, seed=seed * 1000 + s)
            phi, w, anchors = gen_instance(cfg)
            if phi.k != (2 * size + 20) // width:
                bad.append((width, s, "k"))
            used_b = {i for c in phi.clauses for i, _ in c.bool_lits}
            used_r = {i for c in phi.clauses for i in c.real_variables}
            if len(used_b) != size or len(used_r) != size:
                bad.append((width, s, "coverage"))
            if any(not c.reals_hold(a) for c, a in zip(phi.clauses, anchors)):
                bad.append((width, s, "anchor"))
            if not nonnegativity_probe(w.wx, phi.box_array, seed=s).ok:
                bad.append((width, s, "nonnegativity"))
    return not bad, f"400 instances, {len(bad)} failures" + (f" (first: {bad[0]})" if bad else "")


def _sampler(seed, runs=10_000, steps=1000):
    body = LiftedBody(Polytope([[1], [-1]], [5, 0]), PolyWeight([(1.0, {0: 1})]))
    tilted = LiftedBody(Polytope([[1, 1], [1, 0], [-1, 0], [0, 1], [0, -1]], [8, 6, 0, 6, 0]),
                        PolyWeight([(10.0, {}), (-0.2, {0: 2}), (0.5, {1: 1})]))
    violations = 0
    for i, (B, start) in enumerate([(body, [2.5, 1.0]), (tilted, [2.0, 2.0, 4.0])]):
        _, chain = hit_and_run(B, start, WalkConfig(500_000, seed + i), record=True)
        violations += int(np.count_nonzero(~member_many(B, chain)))
    xs = hit_and_run_many(body, [2.5, 1.0], WalkConfig(steps, seed), runs)[:, 0]
    observed, _ = np.histogram(xs, bins=10, range=(0, 5))
    expected = runs * np.diff(np.linspace(0, 5, 11) ** 2) / 25
    p = stats.chisquare(observed, expected).pvalue
    return violations == 0 and p > 0.01, f"{violations} violations in 10^6 iterates, chi2 p = {p:.3f}"


def _brute(seed, walk_steps=1000, cap=4_000_000, grid=2000):
    good, errs = 0, []
    for s in range(20):
        phi, w = small_hybrid(seed * 1000 + s)
        truth = brute_force_wmi(phi, w, grid)
        est = approx_wmi(phi, w, 0.15, 0.1, "mc", seed=seed + s, walk_steps=walk_steps,
                         cap=cap).value
        err = abs(est - truth) / truth if truth > 0 else abs(est)
        errs.append(err)
        good += err <= 0.15
    return good >= 18, f"{good}/20 within 15%, worst error {max(errs):.3f}"


def _scale(seed, limit=900.0, compare_size=40):
    cfg = GenConfig(100, 100, 8, seed=seed)
    phi, w, _ = gen_instance(cfg)
    t = time.monotonic()
    r = approx_wmi(phi, w, 0.35, 0.25, "mc", seed=seed)
    elapsed = time.monotonic() - t
    times = {}
    for width in (3, 13):
        half = compare_size // 2
        p2, w2, _ = gen_instance(GenConfig(half, half, width, seed=seed))
        t0 = time.monotonic()
        approx_wmi(p2, w2, 0.35, 0.25, "mc", seed=seed)
        times[width] = time.monotonic() - t0
    trend = "holds" if times[3] > times[13] else "does not hold"
    return elapsed < limit, (f"m+n=200, k={phi.k}: {elapsed:.0f}s (estimate {r.value:.4g}); "
                             f"informative W=3 {times[3]:.1f}s vs W=13 {times[13]:.1f}s at "
                             f"m+n={compare_size}, trend {trend}")


CRITERIA = {
    1: ("Three-clause example", _three_clause),
    2: ("KLM vs brute force", _klm),
    3: ("Volume oracle", _volume),
    4: ("Dependent-weight variant", _dep),
    5: ("Budget formulas", _budget),
    6: ("Generator invariants", _generator),
    7: ("Sampler laws", _sampler),
    8: ("Brute-force equivalence", _brute),
    9: ("Scale smoke test", _scale),
}
SUITES = {"small": (1, 2, 3, 4, 5, 6, 7), "full": tuple(CRITERIA)}


def run_criterion(number: int, seed: int = 0) -> CriterionResult:
    name, fn = CRITERIA[number]
    if number == 5:
        return _timed(fn, number, name)
    return _timed(fn, number, name, seed)


def run_suite(suite: str = "small", seed: int = 0, echo: Callable[[str], None] | None = None):
    results = []
    for number in SUITES[suite]:
        res = run_criterion(number, seed)
        if echo is not None:
            echo(res.line())
        results.append(res)
    return results
