"""Karp-Luby-Madras coverage estimator for weighted model counting on Boolean DNFs."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InstanceSemanticError, ZeroCoverageError
from .formula import Clause, HybridDnf
from .volume import Estimate
from .weights import bool_clause_weight

BATCH = 4096


@dataclass(frozen=True)
class BoolDnf:
    m_bools: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        if not self.clauses:
            raise InstanceSemanticError("formula must contain at least one clause")
        for c in self.clauses:
            if c.lra:
                raise InstanceSemanticError("Boolean DNF clauses cannot hold LRA atoms")
            if any(i >= self.m_bools for i, _ in c.bool_lits):
                raise InstanceSemanticError("Boolean variable index out of range")

    @property
    def k(self) -> int:
        return len(self.clauses)

    @classmethod
    def from_lits(cls, m_bools: int, clauses) -> "BoolDnf":
        """Build from clauses given as iterables of ``(index, polarity)``."""
        return cls(m_bools, tuple(Clause(lits) for lits in clauses))

    @classmethod
    def from_hybrid(cls, phi: HybridDnf) -> "BoolDnf":
        if phi.n_reals or any(c.lra for c in phi.clauses):
            raise InstanceSemanticError("weighted model counting needs a formula without reals")
        return cls(phi.m_bools, phi.clauses)


def klm_trials(eps: float, delta: float, k: int) -> int:
    return math.ceil(8 * (1 + eps) * k * math.log(2 / delta) / eps**2)


def _satisfaction(clauses, bools) -> np.ndarray:
    """``(rows, k)`` matrix of clause satisfaction for a batch of assignments."""
    out = np.empty((len(bools), len(clauses)), dtype=bool)
    for j, c in enumerate(clauses):
        out[:, j] = bools[:, c.positive].all(axis=1) & ~bools[:, c.negative].any(axis=1)
    return out


def _clause_samples(clauses, wb, chosen, rng) -> np.ndarray:
    bools = rng.random((len(chosen), len(wb))) < wb
    for i, c in enumerate(clauses):
        rows = chosen == i
        if rows.any():
            idx = np.flatnonzero(rows)
            bools[np.ix_(idx, c.positive)] = True
            bools[np.ix_(idx, c.negative)] = False
    return bools


def klm_wmc(phi: BoolDnf, wb, eps: float, delta: float, seed=None) -> Estimate:
    """Weighted count of ``phi`` under literal probabilities ``wb``.

    Runs ``T = ceil(8 (1 + eps) k ln(2/delta) / eps^2)`` checks.  A sampled
    assignment is kept until a uniformly chosen clause accepts it, then a new
    one is drawn; the estimate is ``T * sum_j Pr(c_j) / (k N)``.
    """
    if not (0 < eps < 1 and 0 < delta < 1):
        raise ConfigurationError("eps and delta must lie in (0, 1)")
    wb = np.asarray(wb, dtype=float)
    if len(wb) != phi.m_bools:
        raise ConfigurationError("wb length does not match the formula")
    rng = np.random.default_rng(seed)
    k = phi.k
    probs = np.array([bool_clause_weight(c, wb) for c in phi.clauses])
    total = float(probs.sum())
    T = klm_trials(eps, delta, k)
    cdf = np.cumsum(probs / total)

    picks = rng.integers(k, size=T)
    successes = 0
    checks = 0
    used = 0
    while checks < T:
        # Fresh assignments are drawn in batches; each one is checked against
        # uniformly chosen clauses until one accepts it.
        chosen = np.minimum(np.searchsorted(cdf, rng.random(BATCH), side="right"), k - 1)
        sat = _satisfaction(phi.clauses, _clause_samples(phi.clauses, wb, chosen, rng))
        for row in sat:
            if checks >= T:
                break
            used += 1
            while checks < T:
                j = picks[checks]
                checks += 1
                if row[j]:
                    successes += 1
                    break
    diag = {"trials": T, "successes": successes, "samples": used, "U": total}
    if successes == 0:
        raise ZeroCoverageError("no successful trial", diag)
    return Estimate(T * total / (k * successes), eps, delta, diag)


def brute_force_wmc(phi: BoolDnf, wb) -> float:
    """Exact weighted count by enumerating all ``2^m`` assignments."""
    m = phi.m_bools
    if m > 24:
        raise ConfigurationError("enumeration is limited to 24 Boolean variables")
    wb = np.asarray(wb, dtype=float)
    codes = np.arange(1 << m, dtype=np.int64)
    bools = (codes[:, None] >> np.arange(m)) & 1 == 1
    weight = np.prod(np.where(bools, wb, 1.0 - wb), axis=1)
    sat = _satisfaction(phi.clauses, bools).any(axis=1)
    return float(weight[sat].sum())
