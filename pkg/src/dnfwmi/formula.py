"""Hybrid DNF formulas over Boolean variables and linear real arithmetic atoms."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InstanceSemanticError
from .geometry import Polytope

OPS = ("<", "<=", ">", ">=")
_NEGATED = {"<": ">=", "<=": ">", ">": "<=", ">=": "<"}


@dataclass(frozen=True)
class LraAtom:
    """``sum_i coefficients[i] * x_i  op  rhs``."""

    coefficients: tuple[tuple[int, float], ...]
    op: str
    rhs: float

    def __init__(self, coefficients: Mapping[int, float] | Iterable[tuple[int, float]],
                 op: str, rhs: float):
        items = dict(coefficients).items() if not isinstance(coefficients, Mapping) \
            else coefficients.items()
        if op in ("=", "==", "!=", "<>"):
            raise InstanceSemanticError(f"equality atoms unsupported (op {op!r})")
        if op not in OPS:
            raise InstanceSemanticError(f"unknown comparison operator {op!r}")
        coefs = tuple(sorted((int(i), float(c)) for i, c in items if c != 0))
        if not coefs:
            raise InstanceSemanticError("LRA atom has no non-zero coefficient")
        if any(not math.isfinite(c) for _, c in coefs) or not math.isfinite(rhs):
            raise InstanceSemanticError("LRA atom has a non-finite constant")
        if any(i < 0 for i, _ in coefs):
            raise InstanceSemanticError("negative real-variable index")
        object.__setattr__(self, "coefficients", coefs)
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "rhs", float(rhs))

    def negated(self) -> "LraAtom":
        return LraAtom(self.coefficients, _NEGATED[self.op], self.rhs)

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.coefficients)

    @property
    def strict(self) -> bool:
        return self.op in ("<", ">")

    def upper_form(self) -> tuple[dict[int, float], float]:
        """Return ``(a, b)`` with the atom's closure written as ``a . x <= b``."""
        sign = 1.0 if self.op in ("<", "<=") else -1.0
        return {i: sign * c for i, c in self.coefficients}, sign * self.rhs

    def holds(self, reals: np.ndarray) -> bool:
        lhs = sum(c * reals[i] for i, c in self.coefficients)
        if self.op == "<":
            return lhs < self.rhs
        if self.op == "<=":
            return lhs <= self.rhs
        if self.op == ">":
            return lhs > self.rhs
        return lhs >= self.rhs


@dataclass(frozen=True)
class Clause:
    """Conjunction of Boolean literals and LRA atoms.

    ``bool_lits`` holds ``(variable index, polarity)`` pairs.  Negated LRA
    literals are folded into the atom's operator, so ``lra`` stores only
    positive atoms.
    """

    bool_lits: frozenset
    lra: tuple[LraAtom, ...] = ()

    def __init__(self, bool_lits: Iterable[tuple[int, bool]] = (),
                 lra: Sequence[LraAtom] = ()):
        lits = frozenset((int(i), bool(s)) for i, s in bool_lits)
        seen: dict[int, bool] = {}
        for i, s in lits:
            if i < 0:
                raise InstanceSemanticError("negative Boolean-variable index")
            if i in seen:
                raise InstanceSemanticError(
                    f"clause contains Boolean variable {i} with both polarities")
            seen[i] = s
        object.__setattr__(self, "bool_lits", lits)
        object.__setattr__(self, "lra", tuple(lra))

    @property
    def width(self) -> int:
        return len(self.bool_lits) + len(self.lra)

    @cached_property
    def positive(self) -> np.ndarray:
        return np.array(sorted(i for i, s in self.bool_lits if s), dtype=np.intp)

    @cached_property
    def negative(self) -> np.ndarray:
        return np.array(sorted(i for i, s in self.bool_lits if not s), dtype=np.intp)

    @cached_property
    def real_variables(self) -> tuple[int, ...]:
        return tuple(sorted({i for a in self.lra for i in a.variables}))

    @cached_property
    def is_box(self) -> bool:
        """True when every atom mentions a single variable."""
        return all(len(a.coefficients) == 1 for a in self.lra)

    @cached_property
    def _compiled(self):
        cols = np.array(self.real_variables, dtype=np.intp)
        pos = {v: j for j, v in enumerate(self.real_variables)}
        A = np.zeros((len(self.lra), len(cols)))
        b = np.zeros(len(self.lra))
        strict = np.zeros(len(self.lra), dtype=bool)
        for r, atom in enumerate(self.lra):
            row, rhs = atom.upper_form()
            for i, c in row.items():
                A[r, pos[i]] = c
            b[r] = rhs
            strict[r] = atom.strict
        return cols, A, b, strict

    def bools_hold(self, bools: np.ndarray) -> bool:
        return bool(np.all(bools[self.positive])) and not bool(np.any(bools[self.negative]))

    def reals_hold(self, reals: np.ndarray) -> bool:
        if not self.lra:
            return True
        cols, A, b, strict = self._compiled
        lhs = A @ reals[cols]
        return bool(np.all(np.where(strict, lhs < b, lhs <= b)))

    def reals_hold_many(self, reals: np.ndarray) -> np.ndarray:
        """Vectorized LRA check over the rows of ``reals`` (shape ``(N, n)``)."""
        if not self.lra:
            return np.ones(len(reals), dtype=bool)
        cols, A, b, strict = self._compiled
        lhs = reals[:, cols] @ A.T
        return np.all(np.where(strict, lhs < b, lhs <= b), axis=1)


@dataclass(frozen=True, eq=False)
class HybridPoint:
    bools: np.ndarray
    reals: np.ndarray

    def __init__(self, bools, reals):
        object.__setattr__(self, "bools", np.asarray(bools, dtype=bool).reshape(-1))
        object.__setattr__(self, "reals", np.asarray(reals, dtype=float).reshape(-1))


@dataclass(frozen=True, eq=False)
class HybridDnf:
    """Disjunction of :class:`Clause` objects inside a mandatory bounding box."""

    n_reals: int
    m_bools: int
    box: tuple[tuple[float, float], ...]
    clauses: tuple[Clause, ...]
    real_names: tuple[str, ...] = field(default=())
    bool_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "box", tuple((float(lo), float(hi)) for lo, hi in self.box))
        object.__setattr__(self, "clauses", tuple(self.clauses))
        if not self.real_names:
            object.__setattr__(self, "real_names", tuple(f"x{i + 1}" for i in range(self.n_reals)))
        if not self.bool_names:
            object.__setattr__(self, "bool_names", tuple(f"p{i + 1}" for i in range(self.m_bools)))
        if len(self.real_names) != self.n_reals or len(self.bool_names) != self.m_bools:
            raise InstanceSemanticError("variable name lists do not match the variable counts")
        if len(self.box) != self.n_reals:
            raise InstanceSemanticError("every real variable needs a bound")
        for name, (lo, hi) in zip(self.real_names, self.box):
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise InstanceSemanticError(f"real variable {name!r} is unbounded")
            if not lo < hi:
                raise InstanceSemanticError(f"empty bound for real variable {name!r}")
        if not self.clauses:
            raise InstanceSemanticError("formula must contain at least one clause")
        for c in self.clauses:
            if any(i >= self.m_bools for i, _ in c.bool_lits):
                raise InstanceSemanticError("Boolean variable index out of range")
            if any(i >= self.n_reals for i in c.real_variables):
                raise InstanceSemanticError("real variable index out of range")

    @property
    def k(self) -> int:
        return len(self.clauses)

    @property
    def width(self) -> int:
        return max(c.width for c in self.clauses)

    @cached_property
    def box_array(self) -> np.ndarray:
        return np.array(self.box, dtype=float).reshape(self.n_reals, 2)

    def structurally_equal(self, other: "HybridDnf") -> bool:
        return (self.n_reals == other.n_reals and self.m_bools == other.m_bools
                and self.box == other.box and self.clauses == other.clauses
                and self.real_names == other.real_names
                and self.bool_names == other.bool_names)


def evaluate(c: Clause, p: HybridPoint) -> bool:
    """Exact membership of ``p`` in clause ``c``; strict atoms stay strict."""
    return c.bools_hold(p.bools) and c.reals_hold(p.reals)


def evaluate_dnf(phi: HybridDnf, p: HybridPoint) -> bool:
    return any(evaluate(c, p) for c in phi.clauses)


def clause_polytope(c: Clause, box) -> Polytope:
    """H-representation of the closure of a clause's real region.

    One row per atom followed by an upper and a lower row for each variable
    of ``box``.
    """
    box = np.asarray(box, dtype=float).reshape(-1, 2)
    n = len(box)
    rows, rhs = [], []
    for atom in c.lra:
        row, b = atom.upper_form()
        a = np.zeros(n)
        for i, coef in row.items():
            a[i] = coef
        rows.append(a)
        rhs.append(b)
    for i, (lo, hi) in enumerate(box):
        up = np.zeros(n)
        up[i] = 1.0
        rows.append(up)
        rhs.append(hi)
        rows.append(-up)
        rhs.append(-lo)
    A = np.array(rows, dtype=float).reshape(len(rows), n)
    return Polytope(A, np.array(rhs, dtype=float))
