"""Random hybrid DNF benchmark instances.

Generation runs in three stages.  First a propositional DNF skeleton is
built by spreading ``k * W`` literal slots over the ``m + n`` variables so
that each variable is used at least once.  Next, real-variable slots become
linear constraints that a per-clause anchor point satisfies.  Last, a
concave, non-negative polynomial weight is drawn.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigurationError
from .formula import Clause, HybridDnf, LraAtom
from .klm import BoolDnf
from .weights import PolyWeight, WeightFunction

DEFAULT_WIDTHS = (3, 5, 8, 13)
MAX_TERMS = 4
MAX_DEGREE = 5
DEGREE_P = 0.6


@dataclass(frozen=True)
class GenConfig:
    m_bools: int
    n_reals: int
    width: int
    seed: int | None = None
    L: float = 2.0
    privileged_prob: float = 0.5
    box_hi: float = 10.0
    privileged_share: float = 0.5
    clauses: int | None = None

    def __post_init__(self):
        if self.m_bools < 0 or self.n_reals < 0 or self.m_bools + self.n_reals == 0:
            raise ConfigurationError("need at least one variable")
        if self.width < 1:
            raise ConfigurationError("width must be at least 1")
        if self.L <= 1:
            raise ConfigurationError("L must exceed 1")
        if not 0 <= self.privileged_prob <= 1 or not 0 <= self.privileged_share < 1:
            raise ConfigurationError("privileged probabilities must lie in [0, 1)")
        if self.box_hi <= 0:
            raise ConfigurationError("box_hi must be positive")
        if self.k < 1 or self.k * self.width < self.m_bools + self.n_reals:
            raise ConfigurationError(
                f"{self.k} clauses of width {self.width} cannot cover "
                f"{self.m_bools + self.n_reals} variables")

    @property
    def k(self) -> int:
        """``floor((m + n + 20) / W)`` unless ``clauses`` overrides it."""
        if self.clauses is not None:
            return self.clauses
        return (self.m_bools + self.n_reals + 20) // self.width


class GeneratedInstance(NamedTuple):
    formula: HybridDnf
    weight: WeightFunction
    anchors: np.ndarray


def _geometric(rng, p, cap):
    while True:
        g = int(rng.geometric(p))
        if g <= cap:
            return g


def _allocate_slots(cfg: GenConfig, rng) -> np.ndarray:
    """Variable index for each of the ``k * W`` slots, every variable at least once."""
    total = cfg.m_bools + cfg.n_reals
    slots = cfg.k * cfg.width
    extra = slots - total
    if rng.random() < cfg.privileged_prob:
        n_priv = math.ceil(total / 20)
        priv = rng.choice(total, size=n_priv, replace=False)
        n_to_priv = min(extra, round(cfg.privileged_share * slots))
        picks = np.concatenate([rng.choice(priv, size=n_to_priv),
                                rng.integers(total, size=extra - n_to_priv)])
    else:
        picks = rng.integers(total, size=extra)
    return rng.permutation(np.concatenate([np.arange(total), picks]))


def _skeleton(cfg: GenConfig, rng):
    """Per clause: Boolean literals and the real variables needing constraints."""
    order = _allocate_slots(cfg, rng).reshape(cfg.k, cfg.width)
    clauses = []
    for row in order:
        lits = {}
        reals = []
        for v in row:
            if v < cfg.m_bools:
                lits.setdefault(int(v), bool(rng.random() < 0.5))
            else:
                reals.append(int(v - cfg.m_bools))
        clauses.append((lits, reals))
    return clauses


def _constraint(var, n, box_hi, L, anchor, rng) -> LraAtom:
    size = _geometric(rng, 1 / L, n)
    others = [v for v in rng.permutation(n)[:size] if v != var][:size - 1]
    support = [var, *map(int, others)]
    coefs = rng.uniform(-1.0, 1.0, size=len(support))
    coefs[coefs == 0] = 1.0
    lo = float(np.sum(np.minimum(coefs * 0, coefs * box_hi)))
    hi = float(np.sum(np.maximum(coefs * 0, coefs * box_hi)))
    v = rng.uniform(lo, hi)
    lhs = float(coefs @ anchor[support])
    op = "<=" if lhs <= v else ">="
    return LraAtom(dict(zip(support, coefs)), op, v)


def _weight(n, box_hi, rng) -> PolyWeight:
    """Sum of single-variable power terms; concave because degree >= 2 terms are negative."""
    if n == 0:
        return PolyWeight.constant(1.0)
    terms = []
    for _ in range(int(rng.integers(1, MAX_TERMS + 1))):
        degree = _geometric(rng, DEGREE_P, MAX_DEGREE)
        coef = float(rng.uniform(0.1, 1.0))
        if degree >= 2:
            coef = -coef
        elif rng.random() < 0.5:
            coef = -coef
        terms.append((round(coef, 3), {int(rng.integers(n)): degree}))
    poly = PolyWeight(terms)
    box = np.tile([0.0, box_hi], (n, 1))
    low = _corner_minimum(poly, box)
    offset = -low + 1.0 if low < 0 else 0.0
    if offset:
        poly = PolyWeight([*poly.terms, (offset, {})])
    return poly


def _corner_minimum(poly: PolyWeight, box) -> float:
    """Lower bound on a sum of concave single-variable terms over ``box``.

    Each term is minimised at an endpoint of its variable's range, so the sum
    of those term minima bounds the weight from below (exactly when no
    variable appears in two terms).
    """
    total = 0.0
    for coef, key in poly.terms:
        if not key:
            total += coef
            continue
        (i, e), = key
        total += min(coef * box[i, 0] ** e, coef * box[i, 1] ** e)
    return total


def gen_instance(cfg: GenConfig) -> GeneratedInstance:
    """Random hybrid DNF with anchors and a concave non-negative weight."""
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_reals
    skeleton = _skeleton(cfg, rng)
    anchors = rng.uniform(0.0, cfg.box_hi, size=(cfg.k, n))
    clauses = []
    for (lits, reals), anchor in zip(skeleton, anchors):
        atoms = [_constraint(v, n, cfg.box_hi, cfg.L, anchor, rng) for v in reals]
        clauses.append(Clause(lits.items(), atoms))
    phi = HybridDnf(n, cfg.m_bools, [(0.0, cfg.box_hi)] * n, clauses)
    wb = np.round(rng.uniform(0.1, 0.9, size=cfg.m_bools), 3)
    return GeneratedInstance(phi, WeightFunction(wb, _weight(n, cfg.box_hi, rng)), anchors)


def gen_boolean_instance(cfg: GenConfig) -> BoolDnf:
    """Propositional skeleton only; requires ``n_reals == 0``."""
    if cfg.n_reals:
        raise ConfigurationError("a Boolean instance has no real variables")
    rng = np.random.default_rng(cfg.seed)
    return BoolDnf.from_lits(cfg.m_bools, [lits.items() for lits, _ in _skeleton(cfg, rng)])
