"""Coverage estimator for WMI over hybrid DNFs, with its error budget.

The union of the clause regions is estimated from per-clause weights
``U_i``: a clause is chosen with probability ``U_i / U``, a weighted point is
drawn from it, and uniformly chosen clauses are checked against the point
until one accepts it.  Every check is one time unit; after ``T`` units the
estimate is ``T U / (k N_T)`` where ``N_T`` counts accepted points.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import BudgetInfeasibleError, ConfigurationError, DeadlineExceeded, \
    ZeroCoverageError
from .formula import HybridDnf, HybridPoint, evaluate
from .region import ClauseRegion
from .sampler import DEFAULT_STEPS, RegionSampler, sample_free_bools
from .volume import DEFAULT_CAP, Estimate, clause_weight, clause_weight_dep
from .weights import ConditionedWeight, PolyWeight, WeightFunction

T_BOUND = 1138
MODES = ("indep", "dep")


@dataclass(frozen=True)
class Budget:
    epsilon: float
    delta: float
    k: int
    eps_v: float
    eps_s: float
    eps_p: float
    delta_v: float
    delta_s: float
    delta_p: float
    eps_tilde: float
    c_tilde: float
    T: int
    exact_oracles: bool

    @property
    def denominator(self) -> float:
        return self.eps_tilde**2 - 8 * (self.c_tilde - 1) * self.k

    @property
    def t_bound(self) -> int:
        """Closed-form ceiling on ``T`` for the default budget."""
        eps, delta = self.epsilon, self.delta
        return math.ceil(T_BOUND * math.log(8 / delta) * self.k / eps**2) + 1

    def conditions(self) -> dict[str, bool]:
        """Oracle accuracy requirements the budget must satisfy."""
        eps, delta, k = self.epsilon, self.delta, self.k
        log8 = math.log(8 / delta)
        if self.exact_oracles:
            return {
                "eps_v": self.eps_v == 0 and self.delta_v == 0,
                "eps_s": self.eps_s < eps**2 / (8 * k),
                "delta_s": self.delta_s + self.delta_p <= delta / (1518 * log8 * k / eps**2),
                "denominator": self.denominator > 0,
            }
        return {
            "eps_v": self.eps_v <= eps**2 / (47 * k),
            "eps_s": self.eps_s <= eps**2 / (47 * k),
            "eps_p": self.eps_p <= eps**2 / (47 * k**2),
            "delta_v": self.delta_v <= delta / (4 * k),
            "delta_s": self.delta_s + self.delta_p <= delta / (2276 * log8 * k / eps**2),
            "denominator": self.denominator > 0,
            "t_bound": 1 <= self.T <= self.t_bound,
        }

    def to_json(self) -> dict:
        return asdict(self)


def compute_budget(eps: float, delta: float, k: int, exact_oracles: bool = False) -> Budget:
    """Oracle error split and trial count ``T`` for a target ``(eps, delta)``.

    Point evaluation is exact, so ``eps_P = delta_P = 0``.  With exact clause
    weights (``exact_oracles``) the sampler may be looser: ``eps_S`` is kept
    at half of the strict ``eps^2 / 8k`` limit.
    """
    if not (0 < eps < 1 and 0 < delta < 1):
        raise ConfigurationError("eps and delta must lie in (0, 1)")
    if k < 1:
        raise ConfigurationError("k must be at least 1")
    log8 = math.log(8 / delta)
    if exact_oracles:
        eps_v = delta_v = 0.0
        eps_s = eps**2 / (16 * k)
        delta_s = delta / (1518 * log8 * k / eps**2)
    else:
        eps_v = eps_s = eps**2 / (47 * k)
        delta_v = delta / (4 * k)
        delta_s = delta / (2276 * log8 * k / eps**2)
    eps_tilde = (eps - eps_v) / (1 + eps_v)
    c_tilde = (1 + eps_s) * (1 + eps_v) / (1 - eps_v)
    denom = eps_tilde**2 - 8 * (c_tilde - 1) * k
    if not denom > 0:
        raise BudgetInfeasibleError(f"trial-count denominator is {denom:.3g}")
    T = math.ceil(8 * log8 * (1 + eps_tilde) * k / denom)
    return Budget(eps, delta, k, eps_v, eps_s, 0.0, delta_v, delta_s, 0.0,
                  eps_tilde, c_tilde, T, exact_oracles)


@dataclass
class RunReport:
    estimate: Estimate
    per_clause: list[Estimate]
    U: float
    trials_used: int
    successes: int
    samples: int
    budget: Budget
    mode: str
    oracle: str
    seed: int | None = None
    timings: dict = field(default_factory=dict)

    @property
    def value(self) -> float:
        return self.estimate.value

    def to_json(self) -> dict:
        return {"estimate": self.estimate.to_json(),
                "per_clause": [e.to_json() for e in self.per_clause],
                "U": self.U, "trials_used": self.trials_used, "successes": self.successes,
                "samples": self.samples, "budget": self.budget.to_json(), "mode": self.mode,
                "oracle": self.oracle, "seed": self.seed, "timings": dict(self.timings)}


class _ClauseSampler:
    """Cached weighted sampler for one clause; one region sampler per induced weight."""

    def __init__(self, clause, region, wx, wb, method, steps):
        self.clause = clause
        self.region = region
        self.wx = wx
        self.wb = wb
        self.method = method
        self.steps = steps
        self._cache: dict[str, RegionSampler] = {}

    def __call__(self, rng) -> HybridPoint:
        bools = sample_free_bools(self.clause, self.wb, rng)
        if isinstance(self.wx, ConditionedWeight):
            key = self.wx.pattern(bools)
            poly = self.wx.cases[key]
        else:
            key, poly = "", self.wx
        sampler = self._cache.get(key)
        if sampler is None:
            sampler = self._cache[key] = RegionSampler(self.region, poly, self.method, self.steps)
        return HybridPoint(bools, sampler.sample(rng))


def _check_weight(phi: HybridDnf, w: WeightFunction):
    if len(w.wb) != phi.m_bools:
        raise ConfigurationError("wb length does not match the formula's Boolean count")
    if any(v >= phi.n_reals for v in w.wx.variables):
        raise ConfigurationError("weight refers to a real variable outside the formula")
    if isinstance(w.wx, ConditionedWeight) and any(v >= phi.m_bools for v in w.wx.on):
        raise ConfigurationError("weight conditions on an unknown Boolean variable")


def _as_conditioned(w: WeightFunction) -> WeightFunction:
    if isinstance(w.wx, PolyWeight):
        return WeightFunction(w.wb, ConditionedWeight((), {"": w.wx}, 1.0))
    return w


def _run(phi: HybridDnf, w: WeightFunction, eps, delta, *, dep: bool, oracle: str, seed,
         walk_steps: int, cap: int, threads: int, sampler: str,
         timeout: float | None) -> RunReport:
    _check_weight(phi, w)
    start = time.monotonic()
    deadline = None if timeout is None else start + timeout
    k = phi.k
    budget = compute_budget(eps, delta, k, exact_oracles=oracle == "exact-box" and not dep)
    streams = np.random.SeedSequence(seed).spawn(2 * k + 1)
    box = phi.box_array
    regions = [ClauseRegion(c, box, w.wx.variables) for c in phi.clauses]

    def weigh(i):
        fn = clause_weight_dep if dep else clause_weight
        return fn(phi.clauses[i], w, budget.eps_v, budget.delta_v, oracle, box=box, cap=cap,
                  rng=np.random.default_rng(streams[i]), region=regions[i], deadline=deadline)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_clause = list(pool.map(weigh, range(k)))
    else:
        per_clause = [weigh(i) for i in range(k)]
    t_weights = time.monotonic() - start

    U_i = np.array([e.value for e in per_clause])
    active = np.flatnonzero(U_i > 0)
    U = float(U_i[active].sum())
    floor = any(e.floor for e in per_clause)
    mode = "dep" if dep else "indep"

    def report(value, trials, successes, samples, diag):
        diag.update(floor=floor, active_clauses=int(len(active)))
        timings = {"clause_weights": t_weights, "total": time.monotonic() - start}
        return RunReport(Estimate(value, eps, delta, diag), per_clause, U, trials, successes,
                         samples, budget, mode, oracle, seed, timings)

    if len(active) == 0:
        return report(0.0, 0, 0, 0, {"exact": True})

    samplers = {int(i): _ClauseSampler(phi.clauses[i], regions[i], w.wx, w.wb, sampler,
                                       walk_steps) for i in active}
    sample_rngs = {int(i): np.random.default_rng(streams[k + i]) for i in active}
    rng = np.random.default_rng(streams[2 * k])
    cdf = np.cumsum(U_i[active] / U)
    kk = len(active)
    T = budget.T

    # Selection and check indices are pre-drawn; the loop only consumes them.
    picks = active[rng.integers(kk, size=T)]
    choices = active[np.minimum(np.searchsorted(cdf, rng.random(T), side="right"), kk - 1)]
    clock = successes = samples = 0
    while clock < T:
        if deadline is not None and time.monotonic() > deadline:
            raise DeadlineExceeded("estimation hit the deadline")
        i = int(choices[samples])
        point = samplers[i](sample_rngs[i])
        samples += 1
        while clock < T:
            j = picks[clock]
            clock += 1
            if evaluate(phi.clauses[j], point):
                successes += 1
                break
    diag = {"trials": T, "successes": successes, "samples": samples}
    if successes == 0:
        raise ZeroCoverageError("no point was accepted within T checks", diag)
    return report(T * U / (kk * successes), T, successes, samples, diag)


def approx_wmi(phi: HybridDnf, w: WeightFunction, eps: float, delta: float,
               oracle: str = "mc", seed=None, *, walk_steps: int = DEFAULT_STEPS,
               cap: int = DEFAULT_CAP, threads: int = 1, sampler: str = "auto",
               timeout: float | None = None) -> RunReport:
    """``(eps, delta)`` estimate of ``WMI(phi, w)``.

    Factorized weights use the plain clause-weight and sampling oracles; a
    Boolean-conditioned ``w_x`` switches to :func:`approx_wmi_dep`.
    """
    if not w.independent:
        return approx_wmi_dep(phi, w, eps, delta, oracle, seed, walk_steps=walk_steps, cap=cap,
                              threads=threads, sampler=sampler, timeout=timeout)
    return _run(phi, w, eps, delta, dep=False, oracle=oracle, seed=seed, walk_steps=walk_steps,
                cap=cap, threads=threads, sampler=sampler, timeout=timeout)


def approx_wmi_dep(phi: HybridDnf, w: WeightFunction, eps: float, delta: float,
                   oracle: str = "mc", seed=None, *, walk_steps: int = DEFAULT_STEPS,
                   cap: int = DEFAULT_CAP, threads: int = 1, sampler: str = "auto",
                   timeout: float | None = None) -> RunReport:
    """Variant for ``w_x`` that depends on Booleans through a declared ``rho`` bound.

    Clause weights average the integrals induced by sampled Boolean
    assignments, and samples draw the Booleans before the reals.
    """
    return _run(phi, _as_conditioned(w), eps, delta, dep=True, oracle=oracle, seed=seed,
                walk_steps=walk_steps, cap=cap, threads=threads, sampler=sampler,
                timeout=timeout)


def brute_force_wmi(phi: HybridDnf, w: WeightFunction, grid_resolution: int = 200,
                    chunk: int = 1 << 20) -> float:
    """Reference WMI by enumerating Booleans and a midpoint grid over the box.

    A grid cell contributes ``w(midpoint) * cell volume`` when its midpoint
    satisfies a clause whose Boolean literals hold.  Assignments that agree
    on the set of enabled clauses and on the conditioning pattern share one
    grid pass.
    """
    m, n = phi.m_bools, phi.n_reals
    if m > 16 or n > 3:
        raise ConfigurationError("brute force is limited to m <= 16 and n <= 3")
    _check_weight(phi, w)
    wb = w.wb
    codes = np.arange(1 << m, dtype=np.int64)
    bools = (codes[:, None] >> np.arange(m)) & 1 == 1
    prob = np.prod(np.where(bools, wb, 1.0 - wb), axis=1)
    enabled = np.stack([bools[:, c.positive].all(axis=1) & ~bools[:, c.negative].any(axis=1)
                        for c in phi.clauses], axis=1)
    on = w.wx.on if isinstance(w.wx, ConditionedWeight) else ()
    key = np.concatenate([enabled, bools[:, list(on)]], axis=1)
    groups, inverse = np.unique(key, axis=0, return_inverse=True)
    mass = np.bincount(inverse.reshape(-1), weights=prob, minlength=len(groups))

    box = phi.box_array
    widths = box[:, 1] - box[:, 0]
    cell = float(np.prod(widths / grid_resolution))
    axes = [lo + (np.arange(grid_resolution) + 0.5) * wd / grid_resolution
            for (lo, _), wd in zip(box, widths)]
    total = 0.0
    for g, p in zip(groups, mass):
        clauses = [c for c, e in zip(phi.clauses, g[:phi.k]) if e]
        if not clauses or p == 0:
            continue
        if isinstance(w.wx, ConditionedWeight):
            poly = w.wx.cases["".join("1" if b else "0" for b in g[phi.k:])]
        else:
            poly = w.wx
        total += p * _grid_integral(clauses, poly, axes, cell, chunk)
    return float(total)


def _grid_integral(clauses, poly, axes, cell, chunk) -> float:
    if not axes:
        return float(poly(np.zeros(0)))
    first, rest = axes[0], axes[1:]
    rest_pts = np.stack(np.meshgrid(*rest, indexing="ij"), axis=-1).reshape(-1, len(rest)) \
        if rest else np.zeros((1, 0))
    rows = max(1, chunk // len(rest_pts))
    total = 0.0
    for s in range(0, len(first), rows):
        head = first[s:s + rows]
        pts = np.concatenate([np.repeat(head, len(rest_pts))[:, None],
                              np.tile(rest_pts, (len(head), 1))], axis=1)
        inside = np.zeros(len(pts), dtype=bool)
        for c in clauses:
            inside |= c.reals_hold_many(pts)
        if inside.any():
            total += float(np.sum(poly(pts[inside])))
    return total * cell
