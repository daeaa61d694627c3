"""Volume oracles for weight-lifted clause bodies.

Box-shaped clauses are integrated in closed form.  Everything else goes
through :func:`mc_volume`, a rejection estimator whose stopping rule gives a
multiplicative ``(eps, delta)`` guarantee as long as the body fills a
reasonable fraction of its bounding envelope.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import (ConfigurationError, DeadlineExceeded, OracleMismatchError,
                     WeightDomainError)
from .geometry import LiftedBody
from .region import ClauseRegion
from .weights import (ConditionedWeight, PolyWeight, WeightFunction, bool_clause_weight,
                      rho_of)

DEFAULT_CAP = 10**7
ORACLES = ("exact-box", "mc")
MAX_CONDITIONING = 20
_KERNEL_CHUNK = 1 << 22


@dataclass
class Estimate:
    """A non-negative value with the contract it was produced under.

    Exact results carry ``epsilon = delta = 0``.
    """

    value: float
    epsilon: float
    delta: float
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.value >= 0:
            raise ValueError(f"estimate must be non-negative, got {self.value!r}")

    @property
    def floor(self) -> bool:
        return bool(self.diagnostics.get("floor", False))

    def to_json(self) -> dict:
        return {"value": self.value, "epsilon": self.epsilon, "delta": self.delta,
                "diagnostics": dict(self.diagnostics)}


def exact_box_integral(box, wx: PolyWeight) -> float:
    """Closed-form integral of a polynomial over an axis-aligned box."""
    return wx.integrate_box(box)


def stopping_threshold(eps: float, delta: float) -> int:
    """Hit count after which the sequential rejection estimator stops."""
    return math.ceil(1 + 4 * (math.e - 2) * math.log(2 / delta) * (1 + eps) / eps**2)


def _check_unit(name, value):
    if not 0 < value < 1:
        raise ConfigurationError(f"{name} must lie in (0, 1), got {value!r}")


def mc_volume(B: LiftedBody, eps: float, delta: float, cap: int = DEFAULT_CAP,
              rng=None, deadline: float | None = None) -> Estimate:
    """Rejection estimate of ``vol(B)`` from its bounding box times ``[0, height]``.

    Draws are consumed in order and the run stops at the draw where the hit
    count reaches :func:`stopping_threshold`; the estimate is then
    ``envelope * threshold / draws``.  If ``cap`` draws pass first, the plain
    ratio ``envelope * hits / draws`` is returned with ``floor=True``.
    """
    _check_unit("eps", eps)
    _check_unit("delta", delta)
    rng = np.random.default_rng(rng)
    need = stopping_threshold(eps, delta)
    diag = {"draws": 0, "hits": 0, "oracle_calls": 1, "threshold": need, "floor": False}
    box = B.envelope
    height = B.height
    if box is None or height <= 0:
        diag["floor"] = box is not None
        return Estimate(0.0, eps, delta, diag)
    widths = box[:, 1] - box[:, 0]
    envelope = float(np.prod(widths)) * height
    diag["envelope"] = envelope

    if isinstance(B.weight, PolyWeight):
        draws, hits = _compiled_draws(B, box, height, need, cap, rng, deadline)
    else:
        draws, hits = _numpy_draws(B, box, height, need, cap, rng, deadline)
    diag.update(draws=draws, hits=hits)
    if hits >= need:
        return Estimate(envelope * need / draws, eps, delta, diag)
    diag["floor"] = True
    return Estimate(envelope * hits / draws, eps, delta, diag)


def _deadline_check(deadline):
    if deadline is not None and time.monotonic() > deadline:
        raise DeadlineExceeded("volume estimation hit the deadline")


def _compiled_draws(B, box, height, need, cap, rng, deadline):
    coefs, powers = B.weight.dense(range(B.base.dim))
    # Rows that already hold on the whole envelope cannot reject a draw.
    A, b = B.base.A, B.base.b
    worst = np.maximum(A * box[:, 0], A * box[:, 1]).sum(axis=1)
    keep = worst > b
    A = np.ascontiguousarray(A[keep]).reshape(-1, B.base.dim)
    b = np.ascontiguousarray(b[keep])
    lo = np.ascontiguousarray(box[:, 0])
    hi = np.ascontiguousarray(box[:, 1])
    draws = hits = 0
    while draws < cap and hits < need:
        _deadline_check(deadline)
        limit = int(min(_KERNEL_CHUNK, cap - draws))
        seed = int(rng.integers(2**31 - 1))
        d, h, status = _kernels.rejection(A, b, coefs, powers, lo, hi, height,
                                          need - hits, limit, seed)
        if status == 1:
            raise WeightDomainError("sampled weight exceeds the envelope height")
        if status == 2:
            raise WeightDomainError("weight is negative inside the clause region")
        draws += int(d)
        hits += int(h)
    return draws, hits


def _numpy_draws(B, box, height, need, cap, rng, deadline):
    draws = hits = 0
    chunk = 4096
    while draws < cap:
        _deadline_check(deadline)
        size = int(min(chunk, cap - draws))
        X = rng.uniform(box[:, 0], box[:, 1], size=(size, len(box)))
        D = rng.uniform(0.0, height, size=size)
        inside = B.base.contains_many(X)
        wvals = np.zeros(size)
        if inside.any():
            wvals[inside] = B.weight(X[inside])
            if np.any(wvals[inside] > height * (1 + 1e-9)):
                raise WeightDomainError("sampled weight exceeds the envelope height")
            if np.any(wvals[inside] < -1e-9 * max(1.0, height)):
                raise WeightDomainError("weight is negative inside the clause region")
        counts = np.cumsum(inside & (D <= wvals))
        if hits + counts[-1] >= need:
            return draws + int(np.searchsorted(counts, need - hits)) + 1, need
        hits += int(counts[-1])
        draws += size
        chunk = min(chunk * 2, 1 << 20)
    return draws, hits


def region_integral(region: ClauseRegion, poly: PolyWeight, eps: float, delta: float,
                    oracle: str = "mc", cap: int = DEFAULT_CAP, rng=None,
                    deadline: float | None = None) -> Estimate:
    """Integral of ``poly`` over the clause region (no Boolean factor)."""
    if oracle not in ORACLES:
        raise ConfigurationError(f"unknown volume oracle {oracle!r}")
    if region.is_box:
        value = 0.0 if region.empty else exact_box_integral(region.region_box, poly)
        if value < 0:
            raise WeightDomainError("real weight integrates to a negative value")
        return Estimate(value, 0.0, 0.0, {"exact": True, "oracle_calls": 1})
    if oracle == "exact-box":
        raise OracleMismatchError("exact-box oracle used on a clause that is not box-shaped")
    if region.empty:
        return Estimate(0.0, 0.0, 0.0, {"exact": True, "empty": True, "oracle_calls": 1})
    est = mc_volume(region.lifted(poly), eps, delta, cap=cap, rng=rng, deadline=deadline)
    est.value *= region.inactive_volume
    return est


def clause_weight(c, w: WeightFunction, eps: float, delta: float, oracle: str = "mc", *,
                  box, cap: int = DEFAULT_CAP, rng=None, region: ClauseRegion | None = None,
                  deadline: float | None = None) -> Estimate:
    """Boolean literal mass of ``c`` times the integral of ``w_x`` over its region."""
    if not w.independent:
        raise ConfigurationError("clause_weight needs a weight that ignores the Booleans")
    region = region or ClauseRegion(c, box, w.wx.variables)
    est = region_integral(region, w.wx, eps, delta, oracle, cap, rng, deadline)
    est.value *= bool_clause_weight(c, w.wb)
    return est


def dep_parameters(eps: float, delta: float, rho: float) -> dict:
    """Error split and round count of the Boolean-sampling clause weight."""
    eps_samp = eps_comp = eps / (1 + math.sqrt(2))
    delta_samp = delta / 2
    rounds = math.ceil(math.log(2 / delta_samp) / eps_samp**2 * rho**2)
    return {"eps_samp": eps_samp, "eps_comp": eps_comp, "delta_samp": delta_samp,
            "rounds": rounds, "delta_comp": delta / (2 * rounds)}


def pattern_distribution(c, wx: ConditionedWeight, wb) -> tuple[list[str], np.ndarray]:
    """Patterns of the conditioning variables compatible with ``c`` and their probabilities."""
    forced = dict(c.bool_lits)
    free = [j for j, v in enumerate(wx.on) if v not in forced]
    if len(free) > MAX_CONDITIONING:
        raise ConfigurationError("too many free conditioning variables")
    base = ["1" if forced.get(v, False) else "0" for v in wx.on]
    patterns, probs = [], []
    for code in range(1 << len(free)):
        bits = list(base)
        p = 1.0
        for b, j in enumerate(free):
            on = bool(code >> b & 1)
            bits[j] = "1" if on else "0"
            q = wb[wx.on[j]]
            p *= q if on else 1.0 - q
        patterns.append("".join(bits))
        probs.append(p)
    return patterns, np.array(probs)


def clause_weight_dep(c, w: WeightFunction, eps: float, delta: float, oracle: str = "mc", *,
                      box, cap: int = DEFAULT_CAP, rng=None,
                      region: ClauseRegion | None = None,
                      deadline: float | None = None) -> Estimate:
    """Clause weight when ``w_x`` depends on Booleans, by sampling Boolean rounds.

    Each round draws the free Booleans from ``wb`` (literals of ``c`` forced)
    and integrates the induced polynomial.  Only the conditioning variables
    affect a round's value, so rounds are drawn as multinomial counts over
    their patterns and the volume oracle is called once per distinct pattern.
    """
    _check_unit("eps", eps)
    _check_unit("delta", delta)
    wx = w.wx
    if isinstance(wx, PolyWeight):
        wx = ConditionedWeight((), {"": wx}, 1.0)
    rho = rho_of(wx)
    rng = np.random.default_rng(rng)
    params = dep_parameters(eps, delta, rho)
    region = region or ClauseRegion(c, box, wx.variables)
    patterns, probs = pattern_distribution(c, wx, w.wb)
    counts = rng.multinomial(params["rounds"], probs / probs.sum())
    total = 0.0
    calls = 0
    floor = False
    for pattern, count in zip(patterns, counts):
        if count == 0:
            continue
        est = region_integral(region, wx.cases[pattern], params["eps_comp"],
                              params["delta_comp"], oracle, cap, rng, deadline)
        calls += 1
        floor |= est.floor
        total += count * est.value
    mean = total / params["rounds"]
    diag = dict(params, oracle_calls=calls, distinct_patterns=int(np.count_nonzero(counts)),
                floor=floor)
    return Estimate(bool_clause_weight(c, w.wb) * mean, eps, delta, diag)
