import mpmath
import numpy as np
import pytest

from dnfwmi.errors import ConfigurationError, OracleMismatchError
from dnfwmi.formula import Clause, LraAtom
from dnfwmi.geometry import LiftedBody, Polytope
from dnfwmi.region import ClauseRegion
from dnfwmi.volume import (clause_weight, clause_weight_dep, dep_parameters, exact_box_integral,
                           mc_volume, pattern_distribution, region_integral, stopping_threshold)
from dnfwmi.weights import PolyWeight, WeightFunction

from conftest import atom

X = PolyWeight([(1.0, {0: 1})])


def threshold_oracle(eps, delta):
    eps, delta = mpmath.mpf(eps), mpmath.mpf(delta)
    return int(mpmath.ceil(1 + 4 * (mpmath.e - 2) * mpmath.log(2 / delta) * (1 + eps) / eps**2))


@pytest.mark.parametrize("eps,delta", [(0.05, 0.05), (0.1, 0.01), (0.3, 0.2), (0.01, 1e-4)])
def test_stopping_threshold_matches_mpmath(eps, delta):
    assert stopping_threshold(eps, delta) == threshold_oracle(eps, delta)


def test_stopping_threshold_value():
    assert stopping_threshold(0.05, 0.05) == 4453


def test_exact_box_integrals():
    assert exact_box_integral([[0, 5]], X) == pytest.approx(12.5)
    assert exact_box_integral([[0, 10], [0, 10]], PolyWeight.constant(1.0)) == pytest.approx(100)
    xy = PolyWeight([(1.0, {0: 1, 1: 1})])
    assert exact_box_integral([[0, 2], [1, 3]], xy) == pytest.approx(8.0)
    # 4 - x^2 over [-2, 2] is 32 / 3
    bump = PolyWeight([(4.0, {}), (-1.0, {0: 2})])
    assert exact_box_integral([[-2, 2]], bump) == pytest.approx(32 / 3)


def test_mc_volume_triangle():
    body = LiftedBody(Polytope([[-1, 0], [0, -1], [1, 1]], [0, 0, 1]), PolyWeight.constant(1.0))
    est = mc_volume(body, 0.05, 0.05, rng=0)
    assert est.value == pytest.approx(0.5, rel=0.05)
    assert est.diagnostics["hits"] == 4453
    assert not est.floor


def test_mc_volume_callable_weight():
    # a non-polynomial weight goes through the numpy path; integral of 1 - x^2 on [0, 1] is 2/3
    body = LiftedBody(Polytope([[1], [-1]], [1, 0]), lambda x: 1 - np.asarray(x)[..., 0] ** 2)
    est = mc_volume(body, 0.05, 0.05, rng=1)
    assert est.value == pytest.approx(2 / 3, rel=0.05)


def test_mc_volume_cap_sets_floor():
    body = LiftedBody(Polytope([[1], [-1]], [1, 0]), X)
    est = mc_volume(body, 0.05, 0.05, cap=1000, rng=0)
    assert est.floor
    assert est.diagnostics["draws"] == 1000
    assert est.value == pytest.approx(0.5, rel=0.2)


def test_mc_volume_rejects_bad_parameters():
    body = LiftedBody(Polytope([[1], [-1]], [1, 0]), X)
    with pytest.raises(ConfigurationError):
        mc_volume(body, 0.0, 0.1)
    with pytest.raises(ConfigurationError):
        mc_volume(body, 0.1, 1.0)


def test_region_integral_box_clause_is_exact():
    c = Clause([], [atom(0, ">=", 0), atom(0, "<=", 5)])
    est = region_integral(ClauseRegion(c, [[0, 10]], (0,)), X, 0.1, 0.1, "exact-box")
    assert est.value == pytest.approx(12.5)
    assert est.epsilon == 0 and est.delta == 0


def test_region_integral_inactive_factor():
    # x1 is free in [0, 4]; weight depends only on x0
    c = Clause([], [atom(0, "<=", 2)])
    est = region_integral(ClauseRegion(c, [[0, 10], [0, 4]], (0,)), X, 0.1, 0.1)
    assert est.value == pytest.approx(2.0 * 4)


def test_exact_box_oracle_refuses_general_clause():
    c = Clause([], [LraAtom({0: 1, 1: 1}, "<=", 1)])
    region = ClauseRegion(c, [[0, 1], [0, 1]], ())
    with pytest.raises(OracleMismatchError):
        region_integral(region, PolyWeight.constant(1.0), 0.1, 0.1, "exact-box")
    est = region_integral(region, PolyWeight.constant(1.0), 0.05, 0.05, "mc", rng=3)
    assert est.value == pytest.approx(0.5, rel=0.05)


def test_empty_region_is_zero(phi_ex_prime):
    c = phi_ex_prime.clauses[0]
    est = region_integral(ClauseRegion(c, phi_ex_prime.box, ()), PolyWeight.constant(1.0),
                          0.1, 0.1)
    assert est.value == 0.0


def test_unknown_oracle():
    c = Clause([], [atom(0, "<=", 1)])
    with pytest.raises(ConfigurationError):
        region_integral(ClauseRegion(c, [[0, 2]], ()), X, 0.1, 0.1, "grid")


def test_clause_weight_includes_literal_mass(three_clause):
    phi, w = three_clause
    est = clause_weight(phi.clauses[0], w, 0.1, 0.1, "exact-box", box=phi.box)
    # 0.6 * 0.9 * 12.5
    assert est.value == pytest.approx(6.75)


def test_dep_parameters():
    p = dep_parameters(0.2, 0.1, 2.0)
    eps_s = 0.2 / (1 + mpmath.sqrt(2))
    assert p["eps_samp"] == pytest.approx(float(eps_s))
    assert p["rounds"] == int(mpmath.ceil(mpmath.log(2 / 0.05) / eps_s**2 * 4))
    assert p["rounds"] == 2151
    assert p["delta_comp"] == pytest.approx(0.1 / (2 * 2151))


def test_pattern_distribution_respects_forced_literals(dep_example):
    phi, w = dep_example
    patterns, probs = pattern_distribution(phi.clauses[0], w.wx, w.wb)
    assert dict(zip(patterns, probs)) == {"0": 0.5, "1": 0.5}
    forced = Clause([(0, True)], [])
    patterns, probs = pattern_distribution(forced, w.wx, w.wb)
    assert patterns == ["1"] and probs.tolist() == [1.0]


def test_clause_weight_dep_value(dep_example):
    phi, w = dep_example
    est = clause_weight_dep(phi.clauses[0], w, 0.2, 0.1, "exact-box", box=phi.box, rng=0)
    assert est.value == pytest.approx(0.75, rel=0.2)
    assert est.diagnostics["rounds"] == 2151
    assert est.diagnostics["oracle_calls"] == 2


def test_clause_weight_dep_plain_poly_is_exact_for_box():
    c = Clause([], [atom(0, "<=", 5)])
    w = WeightFunction([], X)
    est = clause_weight_dep(c, w, 0.2, 0.1, "exact-box", box=[[0, 10]], rng=0)
    assert est.value == pytest.approx(12.5)
