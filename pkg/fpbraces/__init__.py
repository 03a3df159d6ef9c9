from fpbraces.prelie import PreLieAlgebra, check_prelie_axiom
from fpbraces.filtration import algebra_chain, check_index_bounds
from fpbraces.flows import FlowsContext, Omega, W, exp_L
from fpbraces.brace import Brace, brace_to_prelie, check_brace_axioms, flow_brace
from fpbraces.ybe import build_solution, check_involutive, check_nondegenerate, verify_ybe
from fpbraces.cases import CASES, build_candidate, cases_for
from fpbraces.enumeration import enumerate_case
from fpbraces.sweep_task import SweepTask
from fpbraces.sweep_pool import SweepPool
from fpbraces.config import DEFAULTS, Limits
from fpbraces.errors import FpBracesError

__all__ = [
    "PreLieAlgebra",
    "check_prelie_axiom",
    "algebra_chain",
    "check_index_bounds",
    "FlowsContext",
    "W",
    "Omega",
    "exp_L",
    "Brace",
    "flow_brace",
    "check_brace_axioms",
    "brace_to_prelie",
    "build_solution",
    "verify_ybe",
    "check_involutive",
    "check_nondegenerate",
    "CASES",
    "cases_for",
    "build_candidate",
    "enumerate_case",
    "SweepTask",
    "SweepPool",
    "DEFAULTS",
    "Limits",
    "FpBracesError",
]
