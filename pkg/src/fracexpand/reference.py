"""Independent oracles: analytic power-rule values, direct quadrature of
the Caputo definition, the Sousa finite-difference scheme, and the
unweighted L2 grid metric used by all comparisons.

These deliberately share no code path with the series expansion; they
exist to check it.
"""

from __future__ import annotations

import math

import numpy as np

from . import expr as expr_mod
from .expansion import FractionalOrder, GridFunction, Side
from .quadrature import QuadratureConfig, kernel_power_integral
from .special import gamma, signed_log_gamma

__all__ = [
    "QuadratureConfig",
    "caputo_power_exact",
    "caputo_direct",
    "sousa_scheme",
    "l2_grid_error",
]

#: Relative step-size deviation above which a grid is rejected as non-uniform.
UNIFORM_STEP_TOLERANCE = 1e-9


def caputo_power_exact(
    beta: float, order: FractionalOrder, anchor: float, side: Side, t: float
) -> float:
    """Caputo derivative of the power function, in closed form.

    For x(t) = (t-a)^(beta-1) with beta > n the left derivative is
    Gamma(beta)/Gamma(beta-alpha) (t-a)^(beta-alpha-1); the right side
    mirrors it for y(t) = (b-t)^(beta-1) with powers of (b-t).
    """
    alpha, n = order.alpha, order.n
    if beta <= n:
        raise ValueError(f"power rule needs beta > n = {n}, got beta = {beta!r}")
    delta = t - anchor if side is Side.LEFT else anchor - t
    if delta < 0.0:
        raise ValueError("t outside the operator's domain")
    if delta == 0.0:
        return 0.0  # exponent beta - alpha - 1 > n - alpha - 1 > -1, and beta > alpha
    lg_num = signed_log_gamma(beta)
    lg_den = signed_log_gamma(beta - alpha)
    ratio = lg_num.sign * lg_den.sign * math.exp(lg_num.log_abs - lg_den.log_abs)
    return ratio * delta ** (beta - alpha - 1.0)


def caputo_direct(
    e: expr_mod.ExprNode,
    order: FractionalOrder,
    anchor: float,
    side: Side,
    t: float,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Caputo derivative straight from the definition, by adaptive quadrature.

    Left: (1/Gamma(n-alpha)) int_a^t (t-tau)^(n-alpha-1) x^(n)(tau) dtau
    with anchor = a; the right side integrates from t to anchor = b
    against (tau-t)^(n-alpha-1) and carries the (-1)^n prefactor.  The
    weak kernel singularity is removed exactly by the power substitution
    in the quadrature layer, so this is accurate enough to serve as the
    oracle for the expansion.
    """
    if cfg is None:
        cfg = QuadratureConfig()
    alpha, n = order.alpha, order.n
    q = n - alpha  # in (0, 1): always the singular branch
    xn = expr_mod.differentiate(e, n)

    if side is Side.LEFT:
        if t == anchor:
            return 0.0
        raw = kernel_power_integral(
            lambda tau: expr_mod.evaluate(xn, tau), anchor, t, q, cfg
        )
        prefactor = 1.0
    else:
        if t == anchor:
            return 0.0
        # int_t^b (tau-t)^(q-1) x^(n)(tau) dtau under sigma = b - tau
        raw = kernel_power_integral(
            lambda sigma: expr_mod.evaluate(xn, anchor - sigma),
            0.0,
            anchor - t,
            q,
            cfg,
        )
        prefactor = (-1.0) ** n
    return prefactor * raw / gamma(q)


def sousa_scheme(samples: GridFunction, alpha: float) -> GridFunction:
    """Finite-difference approximation of the order-alpha Caputo derivative,
    alpha in (1, 2), from uniformly spaced samples.

    At node t_j the value is dt^(-alpha)/Gamma(3-alpha) times
    sum_{k=0}^{j-1} d_{j,k} (x_{k+2} - 2 x_{k+1} + x_k) with weights
    d_{j,k} = (j-k)^(2-alpha) - (j-k-1)^(2-alpha).  The stencil needs
    x_{j+1}, so the final input node has no output (the grid shortens
    by one); j = 0 gives the empty sum, i.e. zero.
    """
    if not 1.0 < alpha < 2.0:
        raise ValueError(f"scheme requires order in (1, 2), got {alpha!r}")
    times = samples.times
    if times.size < 2:
        raise ValueError("need at least two samples")
    steps = np.diff(times)
    dt = float(steps.mean())
    if np.max(np.abs(steps - dt)) > UNIFORM_STEP_TOLERANCE * dt:
        raise ValueError("samples must be uniformly spaced")

    x = samples.values
    n_out = times.size - 1
    second_diff = x[2:] - 2.0 * x[1:-1] + x[:-2]  # index k = 0..size-3

    # weights for lag r = j - k >= 1
    r = np.arange(1, n_out, dtype=float)
    w = r ** (2.0 - alpha) - (r - 1.0) ** (2.0 - alpha)

    values = np.zeros(n_out)
    scale = dt ** (-alpha) / gamma(3.0 - alpha)
    for j in range(1, n_out):
        # sum over k = 0..j-1 of w[j-k] * second_diff[k]
        values[j] = scale * float(np.dot(w[:j][::-1], second_diff[:j]))
    return GridFunction(times=times[:-1], values=values)


def l2_grid_error(x: GridFunction, y: GridFunction) -> float:
    """Root of the sum of squared differences over a shared grid.

    Deliberately unweighted (no step-size factor): the comparison tables
    this reproduces use the plain root-sum-of-squares.
    """
    if x.times.size != y.times.size or not np.array_equal(x.times, y.times):
        raise ValueError("grid functions are sampled on different time grids")
    diff = x.values - y.values
    return float(math.sqrt(np.dot(diff, diff)))
