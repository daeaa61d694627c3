"""Per-clause real regions, split into an active block and a free box block.

Real variables that appear neither in a clause's atoms nor in the weight are
only constrained by the instance box, so they integrate to a constant factor
and can be sampled uniformly.  Only the active block needs polytope
machinery.
"""
from __future__ import annotations

from functools import cached_property

import numpy as np

from .formula import Clause, clause_polytope
from .geometry import LiftedBody, Polytope, feasible_interior
from .weights import PolyWeight


def reindex(poly: PolyWeight, cols) -> PolyWeight:
    pos = {int(v): j for j, v in enumerate(cols)}
    return PolyWeight([(c, {pos[i]: e for i, e in key}) for c, key in poly.terms])


def scaled(poly: PolyWeight, factor: float) -> PolyWeight:
    return PolyWeight([(c * factor, dict(key)) for c, key in poly.terms])


class ClauseRegion:
    """Real part of clause ``c`` within ``box`` for weights over ``weight_vars``."""

    def __init__(self, clause: Clause, box, weight_vars=()):
        self.clause = clause
        self.box = np.asarray(box, dtype=float).reshape(-1, 2)
        n = len(self.box)
        self.active = np.array(sorted(set(clause.real_variables) | set(weight_vars)),
                                dtype=np.intp)
        mask = np.ones(n, dtype=bool)
        mask[self.active] = False
        self.inactive = np.flatnonzero(mask)
        widths = self.box[self.inactive, 1] - self.box[self.inactive, 0]
        self.inactive_volume = float(np.prod(widths))
        self.is_box = clause.is_box

    @cached_property
    def polytope(self) -> Polytope:
        return clause_polytope(self.clause, self.box)

    @cached_property
    def reduced(self) -> Polytope:
        return self.polytope.restrict(self.active)

    @cached_property
    def region_box(self) -> np.ndarray:
        """Exact region for box-shaped clauses (closure of strict bounds)."""
        if not self.is_box:
            raise ValueError("clause region is not a box")
        return self.polytope.axis_bounds()

    @cached_property
    def interior_point(self) -> np.ndarray | None:
        """Deepest point of the active block, ``None`` when it has no interior."""
        if self.is_box:
            box = self.region_box
            if np.any(box[:, 1] - box[:, 0] <= 0):
                return None
            return box[self.active].mean(axis=1)
        if len(self.active) == 0:
            return np.zeros(0)
        return feasible_interior(self.reduced)

    @property
    def empty(self) -> bool:
        return self.interior_point is None

    def lifted(self, poly: PolyWeight) -> LiftedBody:
        return LiftedBody(self.reduced, reindex(poly, self.active))

    def sample_inactive(self, rng, size=None) -> np.ndarray:
        lo, hi = self.box[self.inactive, 0], self.box[self.inactive, 1]
        shape = (len(self.inactive),) if size is None else (size, len(self.inactive))
        return rng.uniform(lo, hi, size=shape)
