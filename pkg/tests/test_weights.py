import numpy as np
import pytest

from dnfwmi.errors import ConfigurationError, WeightDomainError
from dnfwmi.formula import Clause, HybridPoint
from dnfwmi.weights import ConditionedWeight, PolyWeight, WeightFunction, bool_clause_weight, \
    concavity_probe, eval_weight, nonnegativity_probe, rho_of, rho_probe

X = PolyWeight([(1.0, {0: 1})])


def test_canonical_form_merges_terms():
    w = PolyWeight([(1.0, {0: 1}), (2.0, {0: 1}), (0.5, {}), (-0.5, {})])
    assert w.terms == ((3.0, ((0, 1),)),)
    assert w == PolyWeight([(3.0, {0: 1, 1: 0})])


def test_eval_weight_three_clause():
    w = WeightFunction([0.6, 0.1], X)
    assert eval_weight(w, HybridPoint([True, False], [3.0])) == pytest.approx(3 * 0.6 * 0.9)


def test_eval_weight_constant():
    w = WeightFunction([0.5, 0.5])
    assert eval_weight(w, HybridPoint([True, False], [])) == pytest.approx(0.25)


def test_eval_weight_conditioned():
    wx = ConditionedWeight((0,), {"1": X, "0": PolyWeight([(2.0, {0: 1})])}, rho=2)
    w = WeightFunction([0.5], wx)
    assert eval_weight(w, HybridPoint([False], [0.5])) == pytest.approx(0.5)
    assert eval_weight(w, HybridPoint([True], [0.5])) == pytest.approx(0.25)


def test_negative_weight_is_domain_error():
    w = WeightFunction([], PolyWeight([(-1.0, {0: 1})]))
    with pytest.raises(WeightDomainError):
        eval_weight(w, HybridPoint([], [2.0]))


def test_wb_must_be_open_unit():
    for bad in ([0.0], [1.0], [1.5], [np.nan]):
        with pytest.raises(ConfigurationError):
            WeightFunction(bad)


def test_bool_clause_weight():
    wb = [0.6, 0.1]
    assert bool_clause_weight(Clause([(0, True), (1, False)]), wb) == pytest.approx(0.54)
    assert bool_clause_weight(Clause(), wb) == 1.0
    assert bool_clause_weight(Clause([(1, True)]), wb) == pytest.approx(0.1)


def test_factorization_on_random_points(rng):
    wx = PolyWeight([(5.0, {}), (0.3, {0: 1}), (-0.1, {1: 2})])
    wb = np.array([0.2, 0.7, 0.4])
    w = WeightFunction(wb, wx)
    for _ in range(200):
        bools = rng.random(3) < 0.5
        x = rng.uniform(0, 5, size=2)
        expected = wx(x) * np.prod(np.where(bools, wb, 1 - wb))
        assert eval_weight(w, HybridPoint(bools, x)) == pytest.approx(expected)


def test_concavity_probe():
    box = np.array([[0.0, 10.0]] * 4)
    assert concavity_probe(X, box).ok
    square = PolyWeight([(1.0, {0: 2})])
    report = concavity_probe(square, box)
    assert not report.ok
    assert all(v["excess"] > 0 for v in report.violations)
    # the corner pair x=0, y=10 at lambda=1/2: 50 on the chord vs 25 on the curve
    assert 0.5 * square([0.0]) + 0.5 * square([10.0]) - square([5.0]) == 25
    paper_like = PolyWeight([(20.0, {}), (-2.2, {3: 4})])
    assert concavity_probe(paper_like, box).ok


def test_nonnegativity_probe():
    box = np.array([[0.0, 10.0]])
    assert nonnegativity_probe(X, box).ok
    assert not nonnegativity_probe(PolyWeight([(1.0, {}), (-0.2, {0: 1})]), box).ok


def test_rho():
    assert rho_of(X) == 1.0
    assert rho_of(WeightFunction([], X)) == 1.0
    wx = ConditionedWeight((0,), {"1": X, "0": PolyWeight([(2.0, {0: 1})])}, rho=2)
    assert rho_of(wx) == 2
    with pytest.raises(ConfigurationError):
        rho_of(ConditionedWeight((0,), {"1": X, "0": X}))
    assert rho_probe(wx, np.array([[0.0, 1.0]])).ok


def test_rho_probe_flags_understated_bound():
    wx = ConditionedWeight((0,), {"1": X, "0": PolyWeight([(3.0, {0: 1})])}, rho=2)
    assert not rho_probe(wx, np.array([[0.1, 1.0]])).ok


def test_conditioned_needs_complete_table():
    with pytest.raises(ConfigurationError):
        ConditionedWeight((0, 1), {"00": X, "01": X, "10": X}, rho=1)
    with pytest.raises(ConfigurationError):
        ConditionedWeight((0,), {"0": X, "1": X}, rho=0.5)


def test_integrate_box_and_upper_bound():
    assert X.integrate_box([[0, 5]]) == pytest.approx(12.5)
    assert PolyWeight.constant(1).integrate_box([[0, 10], [0, 10]]) == pytest.approx(100)
    assert X.integrate_box([[0, 2]]) + X.integrate_box([[4, 10]]) == pytest.approx(44)
    w = PolyWeight([(10.0, {}), (-0.3, {0: 2}), (0.5, {1: 1})])
    box = np.array([[0.0, 3.0], [1.0, 2.0]])
    grid = np.stack(np.meshgrid(np.linspace(0, 3, 60), np.linspace(1, 2, 60)), -1).reshape(-1, 2)
    assert w.upper_bound(box) >= w(grid).max() - 1e-12
