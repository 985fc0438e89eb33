"""Odd cycle transversal (graph bipartization) solvers and benchmark tooling."""

from .compression import IcConfig, solve_ic
from .errors import ConfigurationError, ContractViolation, IntegrationError, ParseError, RefusedError
from .graph import Graph, OctSolution, read_graph, sanitize, verify_oct, write_canonical
from .heuristics import EnsembleConfig, ensemble
from .oracle import brute_force_oct, brute_force_vc
from .reductions import lift_solution, reduce_fixpoint
from .report import SolverReport, Termination
from .vc import solve_oct_vc, solve_vc_exact, to_vc_instance

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "ContractViolation",
    "EnsembleConfig",
    "Graph",
    "IcConfig",
    "IntegrationError",
    "OctSolution",
    "ParseError",
    "RefusedError",
    "SolverReport",
    "Termination",
    "brute_force_oct",
    "brute_force_vc",
    "ensemble",
    "lift_solution",
    "read_graph",
    "reduce_fixpoint",
    "sanitize",
    "solve_ic",
    "solve_oct_vc",
    "solve_vc_exact",
    "to_vc_instance",
    "verify_oct",
    "write_canonical",
]
