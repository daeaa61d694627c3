"""Approximate weighted model integration over hybrid DNF formulas."""
from .errors import *  # noqa: F401,F403
from .estimator import (Budget, RunReport, approx_wmi, approx_wmi_dep, brute_force_wmi,
                        compute_budget)
from .formula import Clause, HybridDnf, HybridPoint, LraAtom, clause_polytope, evaluate, \
    evaluate_dnf
from .generator import GenConfig, gen_boolean_instance, gen_instance
from .geometry import LiftedBody, Polytope, bounding_box, chord, feasible_interior, member
from .instance import parse_instance, read_instance, serialize_instance, write_instance
from .klm import BoolDnf, brute_force_wmc, klm_wmc
from .sampler import WalkConfig, hit_and_run, sample_clause, sample_clause_dep
from .volume import Estimate, clause_weight, clause_weight_dep, exact_box_integral, mc_volume
from .weights import (ConditionedWeight, PolyWeight, WeightFunction, bool_clause_weight,
                      concavity_probe, eval_weight, nonnegativity_probe, rho_of)

__version__ = "0.1.0"
