"""Polytopes in H-representation and the weight-lifted bodies built on them."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.optimize import linprog

from .errors import DegenerateChordError, NumericalDegeneracyError

BISECT_TOL = 1e-10
DEGENERATE_CHORD = 1e-12
EMPTY_DEPTH = 1e-10


@dataclass(frozen=True, eq=False)
class Polytope:
    """``{x : A x <= b}``."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float, ndmin=2)
        b = np.array(self.b, dtype=float).reshape(-1)
        if A.shape[0] != b.shape[0]:
            raise ValueError("row count mismatch between A and b")
        if np.any(np.all(A == 0, axis=1)):
            raise ValueError("polytope row with a zero normal")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    def contains(self, x, tol: float = 0.0) -> bool:
        return bool(np.all(self.A @ np.asarray(x, dtype=float) <= self.b + tol))

    def contains_many(self, X) -> np.ndarray:
        return np.all(np.asarray(X) @ self.A.T <= self.b, axis=1)

    @cached_property
    def is_axis_aligned(self) -> bool:
        return bool(np.all(np.count_nonzero(self.A, axis=1) == 1))

    def restrict(self, cols) -> "Polytope":
        """Project onto ``cols``; rows living entirely outside ``cols`` are dropped.

        Only valid when no row couples a kept column with a dropped one, so
        the polytope is a product of the two coordinate blocks.
        """
        cols = np.asarray(cols, dtype=np.intp)
        inside = np.zeros(self.dim, dtype=bool)
        inside[cols] = True
        nz = self.A != 0
        uses_in = nz[:, inside].any(axis=1)
        uses_out = nz[:, ~inside].any(axis=1)
        if np.any(uses_in & uses_out):
            raise ValueError("a row couples kept and dropped columns")
        return Polytope(self.A[uses_in][:, cols], self.b[uses_in])

    def axis_bounds(self) -> np.ndarray:
        """Bounds implied by single-variable rows alone (may be infinite)."""
        box = np.tile([-np.inf, np.inf], (self.dim, 1))
        for a, b in zip(self.A, self.b):
            nz = np.flatnonzero(a)
            if len(nz) != 1:
                continue
            j = nz[0]
            if a[j] > 0:
                box[j, 1] = min(box[j, 1], b / a[j])
            else:
                box[j, 0] = max(box[j, 0], b / a[j])
        return box


def chebyshev_center(P: Polytope) -> tuple[np.ndarray, float]:
    """Deepest point of ``P`` and its depth (negative when ``P`` is empty)."""
    n = P.dim
    norms = np.linalg.norm(P.A, axis=1)
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([P.A, norms[:, None]])
    res = linprog(c, A_ub=A_ub, b_ub=P.b, bounds=[(None, None)] * n + [(None, 1e12)],
                  method="highs")
    if res.status != 0:
        raise NumericalDegeneracyError(f"deepest-point program failed: {res.message}")
    return res.x[:n], float(res.x[n])


def feasible_interior(P: Polytope, margin: float = 0.0) -> np.ndarray | None:
    """A point at depth greater than ``margin``, or ``None`` if there is none.

    With ``margin=0`` a ``None`` result means the polytope has no interior
    (it is empty or lower-dimensional, hence of measure zero).
    """
    x, depth = chebyshev_center(P)
    if depth <= max(margin, EMPTY_DEPTH):
        return None
    return x


def bounding_box(P: Polytope) -> np.ndarray | None:
    """Per-dimension ``[min, max]`` of ``P`` (shape ``(n, 2)``), ``None`` if empty."""
    if P.is_axis_aligned:
        box = P.axis_bounds()
        return None if np.any(box[:, 0] >= box[:, 1]) else box
    if feasible_interior(P) is None:
        return None
    n = P.dim
    fallback = P.axis_bounds()
    box = np.empty((n, 2))
    for j in range(n):
        for side, sign in ((0, 1.0), (1, -1.0)):
            c = np.zeros(n)
            c[j] = sign
            res = linprog(c, A_ub=P.A, b_ub=P.b, bounds=[(None, None)] * n, method="highs")
            if res.status == 0:
                box[j, side] = res.x[j]
            else:
                box[j, side] = fallback[j, side]
    box[:, 0] = np.maximum(box[:, 0], fallback[:, 0])
    box[:, 1] = np.minimum(box[:, 1], fallback[:, 1])
    return box


@dataclass(frozen=True, eq=False)
class LiftedBody:
    """``{(x, d) : x in base, 0 <= d <= weight(x)}`` in ``n + 1`` dimensions."""

    base: Polytope
    weight: Callable

    @property
    def dim(self) -> int:
        return self.base.dim + 1

    @cached_property
    def envelope(self) -> np.ndarray | None:
        return bounding_box(self.base)

    @cached_property
    def height(self) -> float:
        """Upper bound on the weight over the base's bounding box."""
        box = self.envelope
        if box is None:
            return 0.0
        bound = getattr(self.weight, "upper_bound", None)
        if bound is not None:
            return float(bound(box))
        rng = np.random.default_rng(0)
        probe = rng.uniform(box[:, 0], box[:, 1], size=(100_000, len(box)))
        return 1.1 * float(np.max(self.weight(probe)))


def member(B: LiftedBody, q) -> bool:
    q = np.asarray(q, dtype=float)
    x, d = q[:-1], q[-1]
    return B.base.contains(x) and 0.0 <= d <= B.weight(x)


def member_many(B: LiftedBody, Q) -> np.ndarray:
    Q = np.asarray(Q, dtype=float)
    X, d = Q[:, :-1], Q[:, -1]
    ok = B.base.contains_many(X) & (d >= 0)
    ok[ok] &= d[ok] <= B.weight(X[ok])
    return ok


def chord(B: LiftedBody, origin, direction) -> tuple[float, float]:
    """Maximal parameter interval ``[t_lo, t_hi]`` keeping ``origin + t u`` in ``B``.

    Linear facets are solved in closed form.  The weight surface is located
    by bisection, which is exact enough because the line meets a convex body
    in a single segment.
    """
    q = np.asarray(origin, dtype=float)
    u = np.asarray(direction, dtype=float)
    x, d = q[:-1], q[-1]
    ux, ud = u[:-1], u[-1]

    slope = B.base.A @ ux
    slack = B.base.b - B.base.A @ x
    t_lo, t_hi = -np.inf, np.inf
    pos, neg = slope > 0, slope < 0
    if pos.any():
        t_hi = min(t_hi, float(np.min(slack[pos] / slope[pos])))
    if neg.any():
        t_lo = max(t_lo, float(np.max(slack[neg] / slope[neg])))
    # a nearly horizontal direction overflows to an infinite (inactive) bound
    with np.errstate(over="ignore"):
        if ud > 0:
            t_lo = max(t_lo, -d / ud)
            t_hi = min(t_hi, (B.height - d) / ud)
        elif ud < 0:
            t_hi = min(t_hi, -d / ud)
            t_lo = max(t_lo, (B.height - d) / ud)
    if not (np.isfinite(t_lo) and np.isfinite(t_hi)):
        raise DegenerateChordError("chord is unbounded; the base polytope must be bounded")

    def inside(t):
        return B.weight(x + t * ux) - (d + t * ud) >= 0

    def bisect(outer):
        lo, hi = 0.0, outer
        while abs(hi - lo) > BISECT_TOL:
            mid = 0.5 * (lo + hi)
            if inside(mid):
                lo = mid
            else:
                hi = mid
        return lo

    if not inside(t_hi):
        t_hi = bisect(t_hi)
    if not inside(t_lo):
        t_lo = bisect(t_lo)
    if t_hi - t_lo < DEGENERATE_CHORD:
        raise DegenerateChordError(f"chord length {t_hi - t_lo:.3g}")
    return t_lo, t_hi
