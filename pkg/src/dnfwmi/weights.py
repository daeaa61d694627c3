"""Weight functions: Boolean literal probabilities times a real-variable density.

Two real parts are supported.  :class:`PolyWeight` does not depend on the
Booleans (the factorized scheme).  :class:`ConditionedWeight` selects one
polynomial per assignment of a small conditioning set of Boolean variables
and carries a user-declared bound ``rho`` on the ratio between the largest
and smallest integral of the induced polynomials over any clause region.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Union

import numpy as np

from .errors import ConfigurationError, WeightDomainError

PROBE_TOL = 1e-9


@dataclass(frozen=True)
class PolyWeight:
    """Sum of monomials ``coef * prod_i x_i ** e_i`` in canonical form."""

    terms: tuple[tuple[float, tuple[tuple[int, int], ...]], ...]

    def __init__(self, terms: Iterable[tuple[float, Mapping[int, int]]]):
        merged: dict[tuple[tuple[int, int], ...], float] = {}
        for coef, powers in terms:
            items = powers.items() if isinstance(powers, Mapping) else powers
            key = []
            for i, e in items:
                e = int(e)
                if e < 0:
                    raise ConfigurationError("negative exponent in polynomial weight")
                if int(i) < 0:
                    raise ConfigurationError("negative variable index in polynomial weight")
                if e:
                    key.append((int(i), e))
            key = tuple(sorted(key))
            if len({i for i, _ in key}) != len(key):
                raise ConfigurationError("repeated variable inside one monomial")
            merged[key] = merged.get(key, 0.0) + float(coef)
        canon = tuple(sorted(((c, k) for k, c in merged.items() if c != 0.0),
                             key=lambda t: (sum(e for _, e in t[1]), t[1])))
        object.__setattr__(self, "terms", canon)

    @classmethod
    def constant(cls, value: float) -> "PolyWeight":
        return cls([(value, {})])

    @cached_property
    def variables(self) -> tuple[int, ...]:
        return tuple(sorted({i for _, key in self.terms for i, _ in key}))

    @property
    def degree(self) -> int:
        return max((sum(e for _, e in key) for _, key in self.terms), default=0)

    def dense(self, cols) -> tuple[np.ndarray, np.ndarray]:
        """``(coefs, powers)`` with ``powers[t, j]`` the exponent of ``cols[j]``."""
        pos = {int(v): j for j, v in enumerate(cols)}
        missing = set(self.variables) - set(pos)
        if missing:
            raise ValueError(f"columns do not cover weight variables {sorted(missing)}")
        coefs = np.array([c for c, _ in self.terms], dtype=float)
        powers = np.zeros((len(self.terms), len(pos)), dtype=np.int64)
        for t, (_, key) in enumerate(self.terms):
            for i, e in key:
                powers[t, pos[i]] = e
        return coefs, powers

    def __call__(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        X = np.atleast_2d(x)
        out = np.zeros(X.shape[0])
        for coef, key in self.terms:
            term = np.full(X.shape[0], coef)
            for i, e in key:
                term *= X[:, i] ** e
            out += term
        return float(out[0]) if single else out

    def integrate_box(self, box) -> float:
        """Exact integral over an axis-aligned box given as ``(n, 2)`` bounds."""
        box = np.asarray(box, dtype=float).reshape(-1, 2)
        widths = box[:, 1] - box[:, 0]
        if np.any(widths <= 0):
            return 0.0
        full = float(np.prod(widths))
        total = 0.0
        for coef, key in self.terms:
            val = coef * full
            for i, e in key:
                lo, hi = box[i]
                val *= (hi ** (e + 1) - lo ** (e + 1)) / (e + 1) / (hi - lo)
            total += val
        return total

    def upper_bound(self, box) -> float:
        """Rigorous upper bound over a box by interval arithmetic per monomial."""
        box = np.asarray(box, dtype=float).reshape(-1, 2)
        total = 0.0
        for coef, key in self.terms:
            lo_t, hi_t = 1.0, 1.0
            for i, e in key:
                lo, hi = box[i]
                cands = [lo ** e, hi ** e]
                if e % 2 == 0 and lo < 0 < hi:
                    cands.append(0.0)
                f_lo, f_hi = min(cands), max(cands)
                prods = [lo_t * f_lo, lo_t * f_hi, hi_t * f_lo, hi_t * f_hi]
                lo_t, hi_t = min(prods), max(prods)
            total += coef * hi_t if coef > 0 else coef * lo_t
        return total

    def to_json(self, real_names) -> dict:
        return {"kind": "poly",
                "terms": [{"coef": c, "powers": {real_names[i]: e for i, e in key}}
                          for c, key in self.terms]}


@dataclass(frozen=True)
class ConditionedWeight:
    """Real weight chosen by the values of the Boolean variables in ``on``.

    ``cases`` maps a bitstring (character ``j`` is the value of ``on[j]``)
    to the polynomial used under that assignment; the table is complete.
    """

    on: tuple[int, ...]
    cases: Mapping[str, PolyWeight]
    rho: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "on", tuple(int(i) for i in self.on))
        object.__setattr__(self, "cases", dict(self.cases))
        if len(set(self.on)) != len(self.on):
            raise ConfigurationError("duplicate conditioning variable")
        expected = {"".join(bits) for bits in itertools.product("01", repeat=len(self.on))}
        if set(self.cases) != expected:
            raise ConfigurationError(
                f"conditioned weight needs exactly the cases {sorted(expected)}")
        if self.rho is not None and not (np.isfinite(self.rho) and self.rho >= 1):
            raise ConfigurationError("rho must be a finite number >= 1")

    def __hash__(self):
        return hash((self.on, tuple(sorted(self.cases.items())), self.rho))

    def pattern(self, bools) -> str:
        bools = np.asarray(bools, dtype=bool)
        return "".join("1" if bools[i] else "0" for i in self.on)

    def induced(self, bools) -> PolyWeight:
        return self.cases[self.pattern(bools)]

    @cached_property
    def variables(self) -> tuple[int, ...]:
        return tuple(sorted({i for p in self.cases.values() for i in p.variables}))

    def __call__(self, x, bools) -> np.ndarray | float:
        return self.induced(bools)(x)

    def to_json(self, real_names, bool_names) -> dict:
        doc = {"kind": "conditioned", "on": [bool_names[i] for i in self.on],
               "cases": {k: v.to_json(real_names) for k, v in sorted(self.cases.items())}}
        if self.rho is not None:
            doc["rho"] = self.rho
        return doc


RealWeight = Union[PolyWeight, ConditionedWeight]


@dataclass(frozen=True, eq=False)
class WeightFunction:
    wb: np.ndarray
    wx: RealWeight = field(default_factory=lambda: PolyWeight.constant(1.0))

    def __post_init__(self):
        wb = np.array(self.wb, dtype=float).reshape(-1)
        if np.any(~np.isfinite(wb)) or np.any(wb <= 0) or np.any(wb >= 1):
            raise ConfigurationError("Boolean probabilities must lie strictly inside (0, 1)")
        wb.setflags(write=False)
        object.__setattr__(self, "wb", wb)

    @property
    def independent(self) -> bool:
        return isinstance(self.wx, PolyWeight)

    def real_part(self, bools=None) -> PolyWeight:
        if self.independent:
            return self.wx
        if bools is None:
            raise ValueError("a Boolean assignment is needed to induce a conditioned weight")
        return self.wx.induced(bools)

    def structurally_equal(self, other: "WeightFunction") -> bool:
        return np.array_equal(self.wb, other.wb) and self.wx == other.wx


def literal_factors(wb: np.ndarray, bools) -> np.ndarray:
    bools = np.asarray(bools, dtype=bool)
    return np.where(bools, wb, 1.0 - wb)


def eval_weight(w: WeightFunction, p) -> float:
    """``w_x(reals[, bools]) * prod_i wb-literal factor``."""
    wx = w.real_part(p.bools)(p.reals)
    if wx < 0:
        raise WeightDomainError(f"real weight is negative ({wx!r}) at {p.reals.tolist()}")
    return float(wx * np.prod(literal_factors(w.wb, p.bools)))


def bool_clause_weight(c, wb) -> float:
    """Probability mass of the clause's Boolean literals."""
    wb = np.asarray(wb, dtype=float)
    return float(np.prod(wb[c.positive]) * np.prod(1.0 - wb[c.negative]))


@dataclass
class ProbeReport:
    name: str
    trials: int
    violations: list = field(default_factory=list)
    worst: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations


def _probe_points(box, count, rng):
    box = np.asarray(box, dtype=float).reshape(-1, 2)
    return rng.uniform(box[:, 0], box[:, 1], size=(count, len(box)))


def _corners(box, cols):
    box = np.asarray(box, dtype=float).reshape(-1, 2)
    base = box.mean(axis=1)
    pts = []
    for bits in itertools.product((0, 1), repeat=len(cols)):
        x = base.copy()
        for j, bit in zip(cols, bits):
            x[j] = box[j, bit]
        pts.append(x)
    return np.array(pts)


def _polys(wx):
    return list(wx.cases.values()) if isinstance(wx, ConditionedWeight) else [wx]


def concavity_probe(wx, box, trials=10_000, tol=PROBE_TOL, seed=0) -> ProbeReport:
    """Randomized midpoint-style check of concavity; never a proof."""
    rng = np.random.default_rng(seed)
    report = ProbeReport("concavity", trials)
    for poly in _polys(wx):
        x = _probe_points(box, trials, rng)
        y = _probe_points(box, trials, rng)
        if len(poly.variables) <= 10:
            corners = _corners(box, poly.variables)
            x[: len(corners)] = corners[: trials]
            y[: len(corners)] = corners[::-1][: trials]
        lam = rng.uniform(size=(trials, 1))
        lhs = lam[:, 0] * poly(x) + (1 - lam[:, 0]) * poly(y)
        rhs = poly(lam * x + (1 - lam) * y)
        excess = lhs - rhs
        scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
        bad = np.nonzero(excess > tol * scale)[0]
        if len(excess):
            report.worst = max(report.worst, float(np.max(excess / scale)))
        for j in bad[:20]:
            report.violations.append({"x": x[j].tolist(), "y": y[j].tolist(),
                                      "lambda": float(lam[j, 0]),
                                      "excess": float(excess[j])})
    return report


def nonnegativity_probe(wx, box, points=100_000, tol=PROBE_TOL, seed=0) -> ProbeReport:
    rng = np.random.default_rng(seed)
    report = ProbeReport("nonnegativity", points)
    for poly in _polys(wx):
        x = _probe_points(box, points, rng)
        if len(poly.variables) <= 12:
            x = np.vstack([x, _corners(box, poly.variables)])
        vals = poly(x)
        report.worst = min(report.worst, float(vals.min()))
        for j in np.nonzero(vals < -tol)[0][:20]:
            report.violations.append({"x": x[j].tolist(), "value": float(vals[j])})
    return report


def rho_of(w) -> float:
    """Declared integral-ratio bound; 1 for weights that ignore the Booleans."""
    wx = getattr(w, "wx", w)
    if isinstance(wx, PolyWeight):
        return 1.0
    if wx.rho is None:
        raise ConfigurationError("conditioned weight does not declare a rho bound")
    return float(wx.rho)


def rho_probe(wx, box, points=10_000, seed=0) -> ProbeReport:
    """Check the pointwise sufficient condition ``max_v w / min_v w <= rho``."""
    rho = rho_of(wx)
    rng = np.random.default_rng(seed)
    report = ProbeReport("rho", points)
    x = _probe_points(box, points, rng)
    vals = np.array([poly(x) for poly in _polys(wx)])
    hi, lo = vals.max(axis=0), vals.min(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(hi == 0, 1.0, hi / lo)
    report.worst = float(np.max(ratio))
    for j in np.nonzero(ratio > rho * (1 + PROBE_TOL))[0][:20]:
        report.violations.append({"x": x[j].tolist(), "ratio": float(ratio[j])})
    return report
