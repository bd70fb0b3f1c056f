"""Numerical Caputo fractional derivatives via integer-order expansions.

The package approximates Caputo derivatives of arbitrary positive
non-integer order by a finite series of ordinary derivatives and moment
integrals, bounds the truncation error, reduces fractional initial-value
problems to ordinary ODE systems, and ships independent oracles
(analytic power rules, direct quadrature of the definition, a classical
finite-difference scheme) to validate everything against.
"""

from .expansion import (
    ApproxParams,
    CoefficientTable,
    FractionalOrder,
    GridFunction,
    MomentVector,
    Side,
    SingularityError,
    caputo_expansion,
    coefficient_table,
    cumulative_moments,
    error_bound,
    rl_from_caputo_left,
    rl_from_caputo_right,
    rl_integral,
)
from .expr import (
    DerivativeCapError,
    EvalError,
    ExprNode,
    ParseError,
    differentiate,
    evaluate,
    parse,
    to_infix,
)
from .quadrature import QuadratureConfig, QuadratureError
from .reference import (
    caputo_direct,
    caputo_power_exact,
    l2_grid_error,
    sousa_scheme,
)
from .rk import DenseSolution, SolverError, integrate_ode
from .solver import (
    AugmentedState,
    FDEProblem,
    SolutionGrid,
    SolverConfig,
    build_rhs,
    solve_fde,
    successive_consistency,
)
from .special import GammaPoleError, SignedLogGamma, binomial_real, gamma, signed_log_gamma

__version__ = "0.1.0"

__all__ = [
    "ApproxParams",
    "AugmentedState",
    "CoefficientTable",
    "DenseSolution",
    "DerivativeCapError",
    "EvalError",
    "ExprNode",
    "FDEProblem",
    "FractionalOrder",
    "GammaPoleError",
    "GridFunction",
    "MomentVector",
    "ParseError",
    "QuadratureConfig",
    "QuadratureError",
    "Side",
    "SignedLogGamma",
    "SingularityError",
    "SolutionGrid",
    "SolverConfig",
    "SolverError",
    "binomial_real",
    "build_rhs",
    "caputo_direct",
    "caputo_expansion",
    "caputo_power_exact",
    "coefficient_table",
    "cumulative_moments",
    "differentiate",
    "error_bound",
    "evaluate",
    "gamma",
    "integrate_ode",
    "l2_grid_error",
    "parse",
    "rl_from_caputo_left",
    "rl_from_caputo_right",
    "rl_integral",
    "signed_log_gamma",
    "solve_fde",
    "sousa_scheme",
    "successive_consistency",
    "to_infix",
]
