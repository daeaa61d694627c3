"""Weighted point sampling from clauses via hit-and-run on lifted bodies.

A uniform point of ``{(x, d) : x in region, 0 <= d <= w(x)}`` has an ``x``
marginal proportional to ``w``, so dropping ``d`` gives weighted samples.
Stretching ``d`` by a constant leaves that marginal unchanged; the walk uses
this to bring the lifted coordinate to the scale of the region.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigurationError, DegenerateChordError, NoSampleError, \
    SamplerStuckError, WeightDomainError
from .formula import Clause, HybridPoint
from .geometry import LiftedBody, chord, member
from .region import ClauseRegion, reindex, scaled
from .weights import ConditionedWeight, PolyWeight, WeightFunction

DEFAULT_STEPS = 10_000
SAMPLERS = ("auto", "hit-and-run")
_SEED_HI = 2**31 - 1


@dataclass(frozen=True)
class WalkConfig:
    steps: int = DEFAULT_STEPS
    seed: int | None = None

    def __post_init__(self):
        if self.steps < 1:
            raise ConfigurationError("walk needs at least one step")


def _walk_arrays(B: LiftedBody):
    coefs, powers = B.weight.dense(range(B.base.dim))
    return (np.ascontiguousarray(B.base.A), np.ascontiguousarray(B.base.b), coefs, powers,
            float(B.height))


def hit_and_run(B: LiftedBody, start, cfg: WalkConfig, rng=None, record: bool = False):
    """Run ``cfg.steps`` hit-and-run iterations from ``start`` inside ``B``.

    Returns the final iterate, or ``(final, chain)`` with every iterate when
    ``record`` is set.  Polynomial weights run in a compiled loop; any other
    callable weight falls back to :func:`dnfwmi.geometry.chord`.
    """
    start = np.asarray(start, dtype=float)
    if not member(B, start):
        raise ValueError("hit-and-run must start inside the body")
    rng = np.random.default_rng(cfg.seed if rng is None else rng)
    if isinstance(B.weight, PolyWeight):
        A, b, coefs, powers, height = _walk_arrays(B)
        chain = np.empty((cfg.steps if record else 0, len(start)))
        seed = int(rng.integers(_SEED_HI))
        q, status = _kernels.walk(A, b, coefs, powers, height, start, cfg.steps, seed, chain)
        if status:
            raise SamplerStuckError("too many consecutive degenerate chords")
        return (q, chain) if record else q
    return _python_walk(B, start, cfg.steps, rng, record)


def _python_walk(B, q, steps, rng, record):
    q = q.copy()
    chain = [] if record else None
    for _ in range(steps):
        for _retry in range(_kernels.MAX_RETRIES + 1):
            u = rng.standard_normal(len(q))
            u /= np.linalg.norm(u)
            try:
                t_lo, t_hi = chord(B, q, u)
                break
            except DegenerateChordError:
                continue
        else:
            raise SamplerStuckError("too many consecutive degenerate chords")
        for _shrink in range(_kernels.MAX_SHRINK):
            t = rng.uniform(t_lo, t_hi)
            cand = q + t * u
            if member(B, cand):
                q = cand
                break
            t_lo, t_hi = (t_lo, t) if t > 0 else (t, t_hi)
        if record:
            chain.append(q.copy())
    return (q, np.array(chain)) if record else q


def hit_and_run_many(B: LiftedBody, start, cfg: WalkConfig, runs: int, rng=None) -> np.ndarray:
    """Final points of ``runs`` independent walks from ``start``."""
    start = np.asarray(start, dtype=float)
    if not member(B, start):
        raise ValueError("hit-and-run must start inside the body")
    rng = np.random.default_rng(cfg.seed if rng is None else rng)
    A, b, coefs, powers, height = _walk_arrays(B)
    seeds = rng.integers(_SEED_HI, size=runs)
    out, status = _kernels.walk_many(A, b, coefs, powers, height, start, cfg.steps, seeds)
    if status:
        raise SamplerStuckError("too many consecutive degenerate chords")
    return out


def sample_free_bools(c: Clause, wb, rng) -> np.ndarray:
    """Clause literals forced, every other Boolean drawn from its probability."""
    bools = rng.random(len(wb)) < wb
    bools[c.positive] = True
    bools[c.negative] = False
    return bools


class RegionSampler:
    """Draws reals from a clause region with density proportional to a polynomial.

    ``method="auto"`` samples box-shaped regions exactly by rejection from
    the box times ``[0, max w]``; other regions, or ``method="hit-and-run"``,
    use a walk started at the deepest point of the region with ``d = w/2``.
    """

    def __init__(self, region: ClauseRegion, poly: PolyWeight, method: str = "auto",
                 steps: int = DEFAULT_STEPS):
        if method not in SAMPLERS:
            raise ConfigurationError(f"unknown sampler {method!r}")
        if region.empty:
            raise NoSampleError("clause region is empty")
        self.region = region
        self.poly = reindex(poly, region.active)
        self.steps = steps
        self.exact = method == "auto" and region.is_box
        if self.exact:
            self.box = region.region_box[region.active]
            self.height = self.poly.upper_bound(self.box)
            if self.height <= 0:
                raise NoSampleError("weight vanishes on the clause region")
        else:
            self._prepare_walk()

    def _prepare_walk(self):
        base = self.region.reduced
        raw = LiftedBody(base, self.poly)
        if raw.height <= 0:
            raise NoSampleError("weight vanishes on the clause region")
        widths = raw.envelope[:, 1] - raw.envelope[:, 0]
        self.stretch = float(np.mean(widths)) / raw.height
        self.body = LiftedBody(base, scaled(self.poly, self.stretch))
        x0 = self.region.interior_point
        w0 = self.body.weight(x0)
        if not w0 > 0:
            x0, w0 = self._positive_start()
        self.start = np.append(x0, 0.5 * w0)
        self._arrays = _walk_arrays(self.body)

    def _positive_start(self):
        rng = np.random.default_rng(0)
        box = self.body.envelope
        for _ in range(100):
            x = rng.uniform(box[:, 0], box[:, 1])
            if self.region.reduced.contains(x):
                w = self.body.weight(x)
                if w > 0:
                    return x, w
        raise NoSampleError("no interior point with positive weight; region has zero mass")

    def _active_sample(self, rng) -> np.ndarray:
        if self.exact:
            lo, hi = self.box[:, 0], self.box[:, 1]
            while True:
                X = rng.uniform(lo, hi, size=(64, len(lo)))
                D = rng.uniform(0.0, self.height, size=64)
                W = self.poly(X)
                if np.any(W > self.height * (1 + 1e-9)):
                    raise WeightDomainError("sampled weight exceeds the envelope height")
                ok = np.flatnonzero(D <= W)
                if len(ok):
                    return X[ok[0]]
        A, b, coefs, powers, height = self._arrays
        seed = int(rng.integers(_SEED_HI))
        empty = np.empty((0, len(self.start)))
        q, status = _kernels.walk(A, b, coefs, powers, height, self.start, self.steps,
                                  seed, empty)
        if status:
            raise SamplerStuckError("too many consecutive degenerate chords")
        return q[:-1]

    def sample(self, rng) -> np.ndarray:
        """Full-length real vector."""
        reals = np.empty(len(self.region.box))
        if len(self.region.active):
            reals[self.region.active] = self._active_sample(rng)
        reals[self.region.inactive] = self.region.sample_inactive(rng)
        return reals


def sample_clause(c: Clause, w: WeightFunction, eps: float, delta: float,
                  cfg: WalkConfig = WalkConfig(), *, box, rng=None,
                  method: str = "auto") -> HybridPoint:
    """One point of clause ``c`` weighted by ``w``.

    ``eps`` and ``delta`` are the sampling contract recorded by the caller's
    budget; the walk length is ``cfg.steps`` regardless.
    """
    if not w.independent:
        raise ConfigurationError("sample_clause needs a weight that ignores the Booleans")
    rng = np.random.default_rng(cfg.seed if rng is None else rng)
    region = ClauseRegion(c, box, w.wx.variables)
    sampler = RegionSampler(region, w.wx, method, cfg.steps)
    bools = sample_free_bools(c, w.wb, rng)
    return HybridPoint(bools, sampler.sample(rng))


def sample_clause_dep(c: Clause, w: WeightFunction, eps: float, delta: float,
                      cfg: WalkConfig = WalkConfig(), *, box, rng=None,
                      method: str = "auto") -> HybridPoint:
    """Booleans first, then reals weighted by the polynomial they induce."""
    rng = np.random.default_rng(cfg.seed if rng is None else rng)
    wx = w.wx if isinstance(w.wx, ConditionedWeight) else ConditionedWeight((), {"": w.wx}, 1.0)
    bools = sample_free_bools(c, w.wb, rng)
    region = ClauseRegion(c, box, wx.variables)
    sampler = RegionSampler(region, wx.induced(bools), method, cfg.steps)
    return HybridPoint(bools, sampler.sample(rng))
