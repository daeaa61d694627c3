import math

import numpy as np
import pytest

from dnfwmi.errors import ConfigurationError, InstanceSemanticError
from dnfwmi.formula import Clause, HybridDnf
from dnfwmi.klm import BoolDnf, brute_force_wmc, klm_trials, klm_wmc
from dnfwmi.verify import random_bool_dnf


def test_trials():
    assert klm_trials(0.1, 0.05, 3) == math.ceil(8 * 1.1 * 3 * math.log(40) / 0.01)


def test_single_literal_weight():
    phi = BoolDnf.from_lits(2, [[(0, True)]])
    assert brute_force_wmc(phi, [0.6, 0.3]) == pytest.approx(0.6)
    est = klm_wmc(phi, [0.6, 0.3], 0.1, 0.05, seed=0)
    # one clause covers its own samples: every check succeeds and the estimate is exact
    assert est.value == pytest.approx(0.6)
    assert est.diagnostics["successes"] == est.diagnostics["trials"]


def test_union_of_overlapping_clauses():
    # p0 or p1 with probabilities 0.6 and 0.5: 1 - 0.4 * 0.5
    phi = BoolDnf.from_lits(2, [[(0, True)], [(1, True)]])
    wb = [0.6, 0.5]
    assert brute_force_wmc(phi, wb) == pytest.approx(0.8)
    est = klm_wmc(phi, wb, 0.05, 0.01, seed=1)
    assert est.value == pytest.approx(0.8, rel=0.05)
    assert est.diagnostics["U"] == pytest.approx(1.1)


def test_contradictory_clause_has_no_mass():
    phi = BoolDnf.from_lits(3, [[(0, True), (1, False)], [(2, True)]])
    wb = [0.5, 0.5, 0.25]
    exact = 0.25 + 0.25 * 0.75
    assert brute_force_wmc(phi, wb) == pytest.approx(exact)


@pytest.mark.parametrize("seed", range(5))
def test_random_formulas_within_eps(seed):
    phi, wb = random_bool_dnf(np.random.default_rng(seed))
    exact = brute_force_wmc(phi, wb)
    est = klm_wmc(phi, wb, 0.1, 0.01, seed=seed)
    assert abs(est.value - exact) <= 0.1 * exact


def test_determinism():
    phi, wb = random_bool_dnf(np.random.default_rng(11))
    assert klm_wmc(phi, wb, 0.2, 0.1, seed=3).value == klm_wmc(phi, wb, 0.2, 0.1, seed=3).value


def test_bad_inputs():
    phi = BoolDnf.from_lits(2, [[(0, True)]])
    with pytest.raises(ConfigurationError):
        klm_wmc(phi, [0.5], 0.1, 0.1)
    with pytest.raises(ConfigurationError):
        klm_wmc(phi, [0.5, 0.5], 1.5, 0.1)
    with pytest.raises(InstanceSemanticError):
        BoolDnf.from_lits(2, [[(5, True)]])
    with pytest.raises(InstanceSemanticError):
        BoolDnf(2, ())


def test_from_hybrid_refuses_reals(three_clause):
    phi, _ = three_clause
    with pytest.raises(InstanceSemanticError):
        BoolDnf.from_hybrid(phi)
    plain = HybridDnf(0, 2, [], [Clause([(0, True)])])
    assert BoolDnf.from_hybrid(plain).k == 1
