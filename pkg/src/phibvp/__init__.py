"""Solvers and a priori bounds for d/dt phi(u') = f(t, u, u') on [0, 1]."""

__version__ = "0.1.0"

from .apriori import BoundCertificate, bound_certificate, certify, r0_bound, r1_bound
from .errors import (
    DomainError,
    GridMismatch,
    IterationCap,
    NoBracket,
    NonConvergence,
    ParseError,
    ValidationError,
)
from .expr import Expression, evaluate, parse, to_source
from .grid import C1GridFunction, GridFunction, c1_norm, cumtrapz, lerp, sup_norm
from .operators import apply_K, g_dirichlet, g_sturm_liouville, khat, solve_constants
from .oracle import compare, manufactured_problem, shooting_solve
from .phi import PhiModel, PowerSum, check_assumptions, k_phi_of
from .problem import Dirichlet, ProblemInstance, RhsFunction, SturmLiouville
from .solver import Solution, SolverConfig, apply_N, picard_step, solve, strong_residual
