
import mpmath
import pytest

from dnfwmi import estimator
from dnfwmi.errors import (BudgetInfeasibleError, ConfigurationError, OracleMismatchError,
                           ZeroCoverageError)
from dnfwmi.estimator import approx_wmi, approx_wmi_dep, brute_force_wmi, compute_budget
from dnfwmi.formula import Clause, HybridDnf, LraAtom
from dnfwmi.klm import BoolDnf, brute_force_wmc
from dnfwmi.weights import PolyWeight, WeightFunction

from conftest import atom

mpmath.mp.dps = 40


def trials_oracle(eps, delta, k, exact=False):
    eps, delta = mpmath.mpf(eps), mpmath.mpf(delta)
    if exact:
        ev, es = mpmath.mpf(0), eps**2 / (16 * k)
    else:
        ev = es = eps**2 / (47 * k)
    et = (eps - ev) / (1 + ev)
    ct = (1 + es) * (1 + ev) / (1 - ev)
    denom = et**2 - 8 * (ct - 1) * k
    return int(mpmath.ceil(8 * mpmath.log(8 / delta) * (1 + et) * k / denom))


@pytest.mark.parametrize("eps,delta,k,expected", [
    (0.35, 0.25, 10, 6271), (0.5, 0.5, 1, 292), (0.1, 0.05, 3, 27468),
    (0.15, 0.1, 4, 14702), (0.2, 0.2, 1, 1849), (0.35, 0.25, 27, 16885)])
def test_budget_trials(eps, delta, k, expected):
    assert trials_oracle(eps, delta, k) == expected
    assert compute_budget(eps, delta, k).T == expected


def test_budget_exact_mode():
    b = compute_budget(0.1, 0.05, 3, exact_oracles=True)
    assert b.T == trials_oracle(0.1, 0.05, 3, exact=True) == 26797
    assert b.eps_v == 0 and b.delta_v == 0
    assert all(b.conditions().values())


@pytest.mark.parametrize("eps", [0.05, 0.2, 0.5, 0.9])
@pytest.mark.parametrize("delta", [0.01, 0.25, 0.9])
@pytest.mark.parametrize("k", [1, 7, 50])
def test_budget_conditions_hold(eps, delta, k):
    b = compute_budget(eps, delta, k)
    assert all(b.conditions().values()), b.conditions()
    assert b.eps_p == 0 and b.delta_p == 0


def test_budget_rejects_bad_parameters():
    for args in [(0, 0.1, 1), (0.1, 1, 1), (0.1, 0.1, 0)]:
        with pytest.raises(ConfigurationError):
            compute_budget(*args)
    assert issubclass(BudgetInfeasibleError, ConfigurationError)


def test_three_clause_brute_force(three_clause):
    phi, w = three_clause
    assert brute_force_wmi(phi, w, grid_resolution=20_000) == pytest.approx(11.15, rel=1e-4)


def test_three_clause_estimate(three_clause):
    phi, w = three_clause
    report = approx_wmi(phi, w, 0.1, 0.05, "exact-box", seed=0)
    assert report.budget.T == 26797
    assert report.U == pytest.approx(6.75 + 0.1 * 2 + 0.1 * 42)
    assert abs(report.value - 11.15) <= 0.1 * 11.15
    assert report.estimate.diagnostics["trials"] == report.trials_used == 26797


def test_three_clause_mc_oracle(three_clause):
    phi, w = three_clause
    report = approx_wmi(phi, w, 0.3, 0.2, "mc", seed=1)
    assert abs(report.value - 11.15) <= 0.3 * 11.15


def test_determinism(three_clause):
    phi, w = three_clause
    a = approx_wmi(phi, w, 0.3, 0.2, seed=5)
    b = approx_wmi(phi, w, 0.3, 0.2, seed=5)
    assert a.value == b.value and a.successes == b.successes


def test_threads_do_not_change_result():
    c1 = Clause([], [LraAtom({0: 1, 1: 1}, "<=", 1)])
    c2 = Clause([], [LraAtom({0: 1, 1: -1}, "<=", 0)])
    phi = HybridDnf(2, 0, [(0, 1), (0, 1)], [c1, c2])
    w = WeightFunction([], PolyWeight.constant(1.0))
    a = approx_wmi(phi, w, 0.4, 0.3, seed=2, walk_steps=100)
    b = approx_wmi(phi, w, 0.4, 0.3, seed=2, walk_steps=100, threads=2)
    assert a.value == b.value
    # union of the triangle below x + y = 1 and the one above y = x has area 3/4
    assert abs(a.value - 0.75) <= 0.4 * 0.75


def test_duplicate_clause():
    c = Clause([], [atom(0, "<=", 5)])
    phi = HybridDnf(1, 0, [(0, 10)], [c, c])
    w = WeightFunction([], PolyWeight([(1.0, {0: 1})]))
    report = approx_wmi(phi, w, 0.2, 0.1, "exact-box", seed=0)
    assert report.U == pytest.approx(25.0)
    assert abs(report.value - 12.5) <= 0.2 * 12.5


def test_single_clause_is_exact():
    phi = HybridDnf(1, 1, [(0, 10)], [Clause([(0, True)], [atom(0, "<=", 5)])])
    w = WeightFunction([0.4], PolyWeight([(1.0, {0: 1})]))
    report = approx_wmi(phi, w, 0.3, 0.2, "exact-box", seed=0)
    # with k = 1 every check succeeds, so the estimate equals U
    assert report.value == pytest.approx(0.4 * 12.5)


def test_boolean_only_agrees_with_klm():
    lits = [[(0, True), (1, False)], [(1, True), (2, True)], [(3, False)]]
    wb = [0.3, 0.6, 0.5, 0.8]
    phi = HybridDnf(0, 4, [], [Clause(l) for l in lits])
    exact = brute_force_wmc(BoolDnf.from_lits(4, lits), wb)
    assert brute_force_wmi(phi, WeightFunction(wb, PolyWeight.constant(1.0))) == \
        pytest.approx(exact)
    report = approx_wmi(phi, WeightFunction(wb, PolyWeight.constant(1.0)), 0.1, 0.05,
                        "exact-box", seed=3)
    assert abs(report.value - exact) <= 0.1 * exact


def test_empty_clauses_give_zero(phi_ex_prime):
    w = WeightFunction([0.5], PolyWeight.constant(1.0))
    report = approx_wmi(phi_ex_prime, w, 0.2, 0.1, seed=0)
    assert report.value == 0.0
    assert report.estimate.diagnostics["exact"]


def test_zero_weight_clause_is_dropped():
    empty = Clause([], [atom(0, ">=", 20)])
    good = Clause([], [atom(0, "<=", 5)])
    phi = HybridDnf(1, 0, [(0, 10)], [empty, good])
    w = WeightFunction([], PolyWeight([(1.0, {0: 1})]))
    report = approx_wmi(phi, w, 0.2, 0.1, "exact-box", seed=0)
    assert report.estimate.diagnostics["active_clauses"] == 1
    assert report.value == pytest.approx(12.5)


def test_zero_coverage(monkeypatch, three_clause):
    phi, w = three_clause
    monkeypatch.setattr(estimator, "evaluate", lambda c, p: False)
    with pytest.raises(ZeroCoverageError):
        approx_wmi(phi, w, 0.5, 0.5, "exact-box", seed=0)


def test_exact_box_oracle_on_general_clause():
    phi = HybridDnf(2, 0, [(0, 1), (0, 1)], [Clause([], [LraAtom({0: 1, 1: 1}, "<=", 1)])])
    with pytest.raises(OracleMismatchError):
        approx_wmi(phi, WeightFunction([], PolyWeight.constant(1.0)), 0.3, 0.2, "exact-box")


def test_weight_mismatch(three_clause):
    phi, _ = three_clause
    with pytest.raises(ConfigurationError):
        approx_wmi(phi, WeightFunction([0.5], PolyWeight.constant(1.0)), 0.3, 0.2)


def test_dep_instance(dep_example):
    phi, w = dep_example
    assert brute_force_wmi(phi, w, grid_resolution=1000) == pytest.approx(0.75, rel=1e-5)
    report = approx_wmi(phi, w, 0.2, 0.1, "exact-box", seed=0)
    assert report.mode == "dep"
    assert not report.budget.exact_oracles
    assert abs(report.value - 0.75) <= 0.2 * 0.75


def test_dep_wrapper_on_plain_weight(three_clause):
    phi, w = three_clause
    report = approx_wmi_dep(phi, w, 0.3, 0.2, "exact-box", seed=4)
    assert report.mode == "dep"
    assert abs(report.value - 11.15) <= 0.3 * 11.15


def test_brute_force_limits():
    phi = HybridDnf(4, 0, [(0, 1)] * 4, [Clause([], [atom(0, "<=", 1)])])
    with pytest.raises(ConfigurationError):
        brute_force_wmi(phi, WeightFunction([], PolyWeight.constant(1.0)))
