import numpy as np
import pytest

from dnfwmi.formula import Clause, HybridDnf, LraAtom
from dnfwmi.verify import dep_instance, three_clause_instance


def atom(var, op, rhs, coef=1.0):
    return LraAtom({var: coef}, op, rhs)


@pytest.fixture
def three_clause():
    return three_clause_instance()


@pytest.fixture
def dep_example():
    return dep_instance()


@pytest.fixture
def phi_ex_prime():
    """Clause with LRA constraints that cannot hold together: x1 + x2 in [1, 4], x1 <= -2, x2 <= 2."""
    c = Clause([(0, False)], [LraAtom({0: 1, 1: 1}, ">=", 1), LraAtom({0: 1, 1: 1}, "<=", 4),
                              atom(0, "<=", -2), atom(1, "<=", 2)])
    return HybridDnf(2, 1, [(-10, 10), (-10, 10)], [c])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
