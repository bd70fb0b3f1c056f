"""Solve Caputo fractional differential equations by ODE augmentation.

A semilinear constant-coefficient problem

    c_alpha * D^alpha x(t) + sum_j c_j x^(j)(t) = f(t),   x^(j)(a) given,

with alpha in (n-1, n), is rewritten using the depth-0 expansion of the
fractional term: D^alpha x ~ A_0 (t-a)^(n-alpha) x^(n) plus a series of
moment terms B_k (t-a)^(n-k-alpha) V_{k-1}(t).  Treating the moments
V_k as extra state variables with V_k' = (t-a)^k x^(n) turns the FDE
into a first-order system of dimension n + N, solvable with an ordinary
adaptive integrator.

The solved-for top derivative divides by A_0 (t-a)^(n-alpha), which
vanishes at t = a, so integration starts at a + epsilon with the
initial state Taylor-shifted from a; the reported grid still begins
with the exact initial point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import expr as expr_mod
from .expansion import (
    ApproxParams,
    CoefficientTable,
    FractionalOrder,
    GridFunction,
    Side,
    SingularityError,
    coefficient_table,
    weighted_moment_sum,
)
from .reference import l2_grid_error
from .rk import DenseSolution, SolverError, integrate_ode

__all__ = [
    "FDEProblem",
    "AugmentedState",
    "SolverConfig",
    "SolutionGrid",
    "SolverError",
    "build_rhs",
    "integrate",
    "solve_fde",
    "successive_consistency",
]


@dataclass(frozen=True)
class FDEProblem:
    """One Caputo initial-value problem on [a, b].

    ``integer_coefficients`` holds c_0..c_{n-1} multiplying x .. x^(n-1);
    ``first_order_extra`` is an additional coefficient on x' (kept
    separate so damping-style terms can be stated independently of the
    positional list).  ``initial_conditions`` are x(a) .. x^(n-1)(a).
    """

    order: FractionalOrder
    a: float
    b: float
    frac_coefficient: float
    integer_coefficients: tuple[float, ...]
    forcing: expr_mod.ExprNode
    initial_conditions: tuple[float, ...]
    first_order_extra: float = 0.0

    def __post_init__(self) -> None:
        n = self.order.n
        if not self.b > self.a:
            raise ValueError(f"need b > a, got [{self.a!r}, {self.b!r}]")
        if self.frac_coefficient == 0.0:
            raise ValueError("frac_coefficient must be nonzero")
        if len(self.integer_coefficients) != n:
            raise ValueError(
                f"expected {n} integer-term coefficients (c_0..c_{n - 1}), "
                f"got {len(self.integer_coefficients)}"
            )
        if len(self.initial_conditions) != n:
            raise ValueError(
                f"expected {n} initial conditions (x(a)..x^({n - 1})(a)), "
                f"got {len(self.initial_conditions)}"
            )
        if self.first_order_extra != 0.0 and n < 2:
            raise ValueError("first_order_extra needs n >= 2 (no x' state)")


@dataclass(frozen=True)
class AugmentedState:
    """State of the augmented system: y = (x..x^(n-1)), v = (V_0..V_{N-1})."""

    t: float
    y: np.ndarray
    v: np.ndarray

    def flat(self) -> np.ndarray:
        return np.concatenate([self.y, self.v])


@dataclass(frozen=True)
class SolverConfig:
    """Integrator tolerances, start offset, and output grid size.

    ``epsilon_start`` is the offset from a at which integration begins;
    None resolves to 1e-6 * (b - a) at solve time, and values above
    1e-3 * (b - a) are rejected.
    """

    abs_tol: float = 1e-8
    rel_tol: float = 1e-8
    max_steps: int = 100_000
    epsilon_start: float | None = None
    grid_size: int = 100

    def __post_init__(self) -> None:
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise ValueError("solver tolerances must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.epsilon_start is not None and self.epsilon_start <= 0.0:
            raise ValueError("epsilon_start must be positive")
        if self.grid_size < 2:
            raise ValueError("grid_size must be >= 2")

    def resolve_epsilon(self, a: float, b: float) -> float:
        eps = self.epsilon_start
        if eps is None:
            eps = 1e-6 * (b - a)
        if eps > 1e-3 * (b - a):
            raise ValueError(
                f"epsilon_start {eps!r} exceeds 1e-3 of the interval length"
            )
        return eps


@dataclass(frozen=True)
class SolutionGrid:
    """Solution samples on the uniform output grid.

    ``states`` has one column per integer derivative (x, x', ...,
    x^(n-1)); ``moments`` has one column per moment state V_k.
    """

    times: np.ndarray
    states: np.ndarray
    moments: np.ndarray

    @property
    def x(self) -> GridFunction:
        return GridFunction(times=self.times, values=self.states[:, 0])


def build_rhs(
    problem: FDEProblem, N: int, table: CoefficientTable
) -> Callable[[float, np.ndarray], np.ndarray]:
    """Right-hand side of the augmented first-order system.

    Solves the expanded equation algebraically for the top derivative:

        x^(n) = [f(t) - sum_j c_j x^(j) - c_v x'
                 - c_alpha * sum_k B_k (t-a)^(n-k-alpha) V_{k-1}]
                / (c_alpha * A_0 * (t-a)^(n-alpha))

    and propagates the moments via V_k' = (t-a)^k x^(n).  Only valid
    strictly to the right of a, where the divisor is nonzero.
    """
    if table.params.m != 0:
        raise ValueError("the ODE reduction uses the depth-0 expansion (m = 0)")
    if table.params.N != N:
        raise ValueError(f"table truncation {table.params.N} != N = {N}")
    if table.side is not Side.LEFT:
        raise ValueError("initial-value problems use the left-side table")

    alpha, n = problem.order.alpha, problem.order.n
    a = problem.a
    c_alpha = problem.frac_coefficient
    c = np.asarray(problem.integer_coefficients, dtype=float)
    c_v = problem.first_order_extra
    f = problem.forcing
    a0 = float(table.A[0])
    b_coeffs = table.B  # B_1..B_N
    exponents = np.array([n - alpha - 1.0 - i for i in range(N)])
    moment_powers = np.arange(N, dtype=float)

    def rhs(t: float, state: np.ndarray) -> np.ndarray:
        if t <= a:
            raise SingularityError(
                f"augmented system is singular at t = {t!r} <= a = {a!r}"
            )
        delta = t - a
        y = state[:n]
        v = state[n:]
        tail = weighted_moment_sum(b_coeffs, exponents, delta, v)
        numer = (
            expr_mod.evaluate(f, t)
            - float(np.dot(c, y))
            - (c_v * y[1] if n >= 2 else 0.0)
            - c_alpha * tail
        )
        xn = numer / (c_alpha * a0 * delta ** (n - alpha))
        out = np.empty(n + N)
        out[: n - 1] = y[1:]
        out[n - 1] = xn
        out[n:] = delta ** moment_powers * xn
        return out

    return rhs


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    initial: AugmentedState,
    t_end: float,
    cfg: SolverConfig,
) -> DenseSolution:
    """Run the adaptive integrator from the given augmented state to t_end."""
    return integrate_ode(
        rhs,
        (initial.t, t_end),
        initial.flat(),
        abs_tol=cfg.abs_tol,
        rel_tol=cfg.rel_tol,
        max_steps=cfg.max_steps,
    )


def _taylor_shift(ics: Sequence[float], eps: float) -> np.ndarray:
    """Initial integer-derivative state at a + eps from the conditions at a.

    y_j(a + eps) = sum_{i=j}^{n-1} x^(i)(a) eps^(i-j) / (i-j)!  -- the
    degree-(n-1) Taylor polynomial and its derivatives; the neglected
    remainder is O(eps^(n-j)).
    """
    n = len(ics)
    out = np.empty(n)
    for j in range(n):
        out[j] = math.fsum(
            ics[i] * eps ** (i - j) / math.factorial(i - j) for i in range(j, n)
        )
    return out


def solve_fde(
    problem: FDEProblem, N: int, cfg: SolverConfig = SolverConfig()
) -> SolutionGrid:
    """Solve the problem with truncation N; sample on the uniform output grid.

    The grid has cfg.grid_size points covering [a, b] inclusive.  The
    first row is the exact initial point (t = a, given conditions, zero
    moments); later rows come from the dense interpolant, never from
    times below a + epsilon.
    """
    if N < 1:
        raise ValueError(f"truncation N must be >= 1, got {N}")
    a, b, n = problem.a, problem.b, problem.order.n
    eps = cfg.resolve_epsilon(a, b)
    table = coefficient_table(
        problem.order, ApproxParams(m=0, N=N), Side.LEFT
    )
    rhs = build_rhs(problem, N, table)

    start = AugmentedState(
        t=a + eps,
        y=_taylor_shift(problem.initial_conditions, eps),
        v=np.zeros(N),
    )
    dense = integrate(rhs, start, b, cfg)

    times = np.linspace(a, b, cfg.grid_size)
    sample_times = np.maximum(times[1:], a + eps)
    rows = dense.sample(sample_times)

    states = np.empty((cfg.grid_size, n))
    moments = np.empty((cfg.grid_size, N))
    states[0] = np.asarray(problem.initial_conditions, dtype=float)
    moments[0] = 0.0
    states[1:] = rows[:, :n]
    moments[1:] = rows[:, n:]
    return SolutionGrid(times=times, states=states, moments=moments)


def successive_consistency(
    problem: FDEProblem, N: int, cfg: SolverConfig = SolverConfig()
) -> float:
    """L2 grid distance between the N-1 and N truncation solutions.

    The self-convergence diagnostic used when no exact solution is
    known: solve twice on the shared output grid and measure the gap.
    """
    if N < 2:
        raise ValueError(f"need N >= 2 to compare against N - 1, got {N}")
    coarse = solve_fde(problem, N - 1, cfg)
    fine = solve_fde(problem, N, cfg)
    return l2_grid_error(coarse.x, fine.x)
