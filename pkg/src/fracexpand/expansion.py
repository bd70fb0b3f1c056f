"""Series expansion of Caputo fractional derivatives in integer-order terms.

For order alpha in (n-1, n), depth m >= 0 and truncation N >= m+1, the
left Caputo derivative of a C^(n+m+1) function admits

    D^alpha x(t) ~ sum_{k=0}^{m} A_k (t-a)^(n+k-alpha) x^(n+k)(t)
                 + sum_{k=m+1}^{N} B_k (t-a)^(n+m-k-alpha) V_{k-m-1}(t)

where V_k(t) = int_a^t (tau-a)^k x^(n)(tau) dtau are moment functions
and the coefficients come from a binomial-series rearrangement of the
kernel.  The truncation error decays like N^(-(n+m-alpha)).  The right
derivative uses mirrored powers of (b-t), moments W_k integrating from
t up to b, and alternating sign prefactors (-1)^(n+k) on A_k and
(-1)^n on B_k.

The singular-looking pieces cancel: B_{m+1} reduces analytically to
1/Gamma(n-alpha), and the products B_k (t-a)^(n+m-k-alpha) V_{k-m-1}(t)
stay bounded because V_j(t) = O((t-a)^(j+1)); they are evaluated in log
space to keep the huge-power/huge-moment cancellation finite in floats.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import expr as expr_mod
from .quadrature import QuadratureConfig, gauss_legendre_rule, kernel_power_integral
from .special import signed_log_gamma

__all__ = [
    "Side",
    "FractionalOrder",
    "ApproxParams",
    "CoefficientTable",
    "MomentVector",
    "GridFunction",
    "SingularityError",
    "coefficient_table",
    "cumulative_moments",
    "caputo_expansion",
    "error_bound",
    "rl_from_caputo_left",
    "rl_from_caputo_right",
    "rl_integral",
    "weighted_moment_sum",
]

#: Orders closer than this to an integer are rejected: the coefficient
#: formulas contain Gamma(alpha - n - k), which has poles at integers.
INTEGER_ORDER_TOLERANCE = 1e-9

#: Below this fraction of the interval length, the moment sum is defined
#: as exactly zero (the 0*inf product resolves to 0 analytically).
ANCHOR_CUTOFF = 1e-12

_MAX_PANELS_PER_CELL = 64


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


class SingularityError(ArithmeticError):
    """A boundary correction term is singular at the requested point."""


@dataclass(frozen=True)
class FractionalOrder:
    """A positive non-integer order alpha with its bracket n = ceil(alpha)."""

    alpha: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.alpha) or self.alpha <= 0.0:
            raise ValueError(f"order must be positive, got {self.alpha!r}")
        if abs(self.alpha - round(self.alpha)) <= INTEGER_ORDER_TOLERANCE:
            raise ValueError(
                f"order {self.alpha!r} is (numerically) an integer; "
                "integer orders are ordinary derivatives"
            )

    @property
    def n(self) -> int:
        return math.ceil(self.alpha)


@dataclass(frozen=True)
class ApproxParams:
    """Expansion depth m and series truncation N, with N >= m + 1."""

    m: int
    N: int

    def __post_init__(self) -> None:
        if self.m < 0:
            raise ValueError(f"depth m must be >= 0, got {self.m}")
        if self.N < self.m + 1:
            raise ValueError(
                f"truncation N must be >= m + 1 = {self.m + 1}, got {self.N}"
            )


@dataclass(frozen=True)
class CoefficientTable:
    """Evaluated A_0..A_m and B_{m+1}..B_N for one (order, params, side)."""

    order: FractionalOrder
    params: ApproxParams
    side: Side
    A: np.ndarray  # shape (m+1,)
    B: np.ndarray  # shape (N-m,), entry i is B_{m+1+i}


@dataclass(frozen=True)
class MomentVector:
    """Moment values V_0..V_{K-1} (or W_k on the right) at one time."""

    values: np.ndarray
    t: float


@dataclass(frozen=True)
class GridFunction:
    """Samples of a scalar function on a strictly increasing time grid."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or values.ndim != 1 or times.size != values.size:
            raise ValueError("times and values must be 1-d and equally long")
        if times.size >= 2 and not np.all(np.diff(times) > 0.0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)


# --- coefficients ------------------------------------------------------------

def coefficient_table(
    order: FractionalOrder, params: ApproxParams, side: Side = Side.LEFT
) -> CoefficientTable:
    """Evaluate the closed-form coefficients.

    The bracketed series in A_k alternates in sign (through the
    Gamma(alpha-n-k) denominator), so its terms are accumulated with
    compensated summation.  B_k is formed from log-gamma differences so
    large truncations (k up to a few hundred) stay inside double range.
    """
    alpha, n = order.alpha, order.n
    m, N = params.m, params.N

    A = np.empty(m + 1)
    for k in range(m + 1):
        den = signed_log_gamma(alpha - n - k)
        terms = [
            num.sign * den.sign
            * math.exp(num.log_abs - den.log_abs - math.lgamma(p - m + k + 1))
            for p in range(m - k + 1, N + 1)
            for num in (signed_log_gamma(p + alpha - n - m),)
        ]
        bracket = 1.0 + math.fsum(terms)
        front = signed_log_gamma(n + k + 1 - alpha)  # positive argument
        A[k] = bracket * math.exp(-front.log_abs)

    lg_na = signed_log_gamma(n - alpha)
    lg_a1n = signed_log_gamma(alpha + 1 - n)
    B = np.empty(N - m)
    for i, k in enumerate(range(m + 1, N + 1)):
        num = signed_log_gamma(k + alpha - n - m)  # argument > 0 for all k
        B[i] = num.sign * math.exp(
            num.log_abs - lg_na.log_abs - lg_a1n.log_abs - math.lgamma(k - m)
        )

    if side is Side.RIGHT:
        signs_a = np.array([(-1.0) ** (n + k) for k in range(m + 1)])
        A = A * signs_a
        B = B * (-1.0) ** n

    return CoefficientTable(order=order, params=params, side=side, A=A, B=B)


# --- moment functions ---------------------------------------------------------

def _panel_count(k_max: int, lo_dist: float, width: float) -> int:
    """Composite panels for one grid cell of the moment sweep.

    The integrands (tau-a)^k vary on a relative scale ~ (tau-a)/k, so
    cells close to the anchor need refinement proportional to
    k * width / distance; capped to keep the sweep O(G * K) overall.
    """
    if width <= 0.0:
        return 1
    dist = max(lo_dist, width)
    return max(1, min(_MAX_PANELS_PER_CELL, math.ceil(k_max * width / (2.0 * dist))))


def _moment_sweep(
    sample: Callable[[np.ndarray], np.ndarray],
    offsets: np.ndarray,
    count: int,
) -> np.ndarray:
    """Cumulative moments M_k(d_i) = int_0^{d_i} s^k f(s) ds on 0 <= d_0 < d_1 < ...

    Returns an array of shape (len(offsets), count).  One function sweep
    covers every k at once: each cell's nodes are evaluated a single
    time and the powers s^k are formed as a Vandermonde block.
    """
    nodes01, weights01 = gauss_legendre_rule(5)
    # map from [-1, 1] to [0, 1] once
    unit_nodes = 0.5 * (nodes01 + 1.0)
    unit_weights = 0.5 * weights01

    k_max = count - 1
    out = np.zeros((offsets.size, count))
    acc = np.zeros(count)
    lo = 0.0
    for i, hi in enumerate(offsets):
        width = hi - lo
        if width > 0.0:
            panels = _panel_count(k_max, lo, width)
            edges = np.linspace(lo, hi, panels + 1)
            starts = edges[:-1]
            h = width / panels
            s = (starts[:, None] + h * unit_nodes[None, :]).ravel()
            w = np.tile(h * unit_weights, panels)
            f = sample(s)
            # powers s^k, k = 0..k_max; k=0 row must be exactly ones
            pw = np.vander(s, count, increasing=True).T
            acc = acc + pw @ (w * f)
        out[i] = acc
        lo = hi
    return out


def cumulative_moments(
    e: expr_mod.ExprNode,
    order: FractionalOrder,
    a: float,
    b: float,
    side: Side,
    grid: np.ndarray,
    count: int,
) -> np.ndarray:
    """Moments V_k (left) or W_k (right), k = 0..count-1, at each grid time.

    Left:  V_k(t) = int_a^t (tau-a)^k x^(n)(tau) dtau.
    Right: W_k(t) = int_t^b (b-tau)^k x^(n)(tau) dtau, computed by the
    reflection u = a + b - tau, which turns it into a left-style sweep
    of the reflected integrand.
    """
    xn = expr_mod.differentiate(e, order.n)
    grid = np.asarray(grid, dtype=float)

    if side is Side.LEFT:
        offsets = grid - a
        sample = lambda s: expr_mod.evaluate_array(xn, a + s)  # noqa: E731
        return _moment_sweep(sample, offsets, count)

    offsets = b - grid[::-1]
    sample = lambda s: expr_mod.evaluate_array(xn, b - s)  # noqa: E731
    return _moment_sweep(sample, offsets, count)[::-1]


# --- expansion ----------------------------------------------------------------

def weighted_moment_sum(
    coeffs: np.ndarray,
    exponents: np.ndarray,
    delta: float,
    moments: np.ndarray,
) -> float:
    """sum_i coeffs[i] * delta^exponents[i] * moments[i], overflow-safely.

    The powers delta^exponents blow up for small delta while the paired
    moments shrink at a matching rate; multiplying magnitudes in log
    space keeps the product representable.  Zero moments contribute
    exactly zero (skipping the would-be 0 * inf).
    """
    if delta <= 0.0:
        return 0.0
    nz = moments != 0.0
    if not np.any(nz):
        return 0.0
    mags = (
        np.log(np.abs(coeffs[nz]))
        + exponents[nz] * math.log(delta)
        + np.log(np.abs(moments[nz]))
    )
    signs = np.sign(coeffs[nz]) * np.sign(moments[nz])
    return math.fsum(signs * np.exp(mags))


def caputo_expansion(
    e: expr_mod.ExprNode,
    a: float,
    b: float,
    order: FractionalOrder,
    params: ApproxParams,
    side: Side,
    grid: Sequence[float],
) -> GridFunction:
    """Truncated expansion of the Caputo derivative on a grid in [a, b].

    At the anchor point (t = a on the left, t = b on the right) the
    value is exactly zero, matching the operator.  Within a relative
    distance ANCHOR_CUTOFF of the anchor the moment sum is also zeroed;
    each of its products vanishes there like (t-a)^(n-alpha).
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        return GridFunction(times=grid, values=np.empty(0))
    if grid.min() < a or grid.max() > b:
        raise ValueError(f"grid must lie inside [{a!r}, {b!r}]")

    alpha, n = order.alpha, order.n
    m, N = params.m, params.N
    table = coefficient_table(order, params, side)
    count = N - m

    derivs = [expr_mod.differentiate(e, n + k) for k in range(m + 1)]
    deriv_vals = [expr_mod.evaluate_array(d, grid) for d in derivs]
    moments = cumulative_moments(e, order, a, b, side, grid, count)

    anchor = a if side is Side.LEFT else b
    deltas = grid - a if side is Side.LEFT else b - grid
    cutoff = ANCHOR_CUTOFF * (b - a)
    # exponents of the moment-sum powers: n + m - k - alpha for k=m+1..N
    exponents = np.array([n - alpha - 1.0 - i for i in range(count)])

    values = np.zeros(grid.size)
    for g in range(grid.size):
        delta = float(deltas[g])
        head = math.fsum(
            table.A[k] * delta ** (n + k - alpha) * deriv_vals[k][g]
            for k in range(m + 1)
        )
        tail = 0.0
        if delta > cutoff:
            tail = weighted_moment_sum(table.B, exponents, delta, moments[g])
        values[g] = head + tail
        if grid[g] == anchor:
            values[g] = 0.0
    return GridFunction(times=grid, values=values)


def error_bound(
    order: FractionalOrder, params: ApproxParams, a: float, t: float, M: float
) -> float:
    """Truncation-error bound: M (t-a)^(n+m+1-alpha) e^(r^2+r) / (Gamma(n+m+1-alpha) N^r r)

    with r = n + m - alpha > 0 and M a bound for |x^(n+m+1)| on [a, t].
    On the right side use t-a := b - t (the bound is symmetric).
    """
    if M < 0.0:
        raise ValueError("derivative bound M must be >= 0")
    if t < a:
        raise ValueError("bound requested at t < a")
    alpha, n = order.alpha, order.n
    m, N = params.m, params.N
    r = n + m - alpha
    if t == a:
        return 0.0
    lg = signed_log_gamma(n + m + 1 - alpha)
    return (
        M
        * (t - a) ** (n + m + 1 - alpha)
        * math.exp(r * r + r - lg.log_abs)
        / (N ** r * r)
    )


# --- Riemann-Liouville bridges -------------------------------------------------

def _boundary_series(
    e: expr_mod.ExprNode, anchor: float, order: FractionalOrder, deltas: np.ndarray
) -> np.ndarray:
    """sum_{k=0}^{n-1} x^(k)(anchor)/Gamma(k-alpha+1) * delta^(k-alpha)."""
    alpha, n = order.alpha, order.n
    coeffs = []
    for k in range(n):
        dk = expr_mod.evaluate(expr_mod.differentiate(e, k), anchor)
        lg = signed_log_gamma(k - alpha + 1.0)
        coeffs.append(dk * lg.sign * math.exp(-lg.log_abs))
    out = np.zeros(deltas.size)
    for i, d in enumerate(deltas):
        if d == 0.0:
            if any(c != 0.0 for c in coeffs):
                raise SingularityError(
                    "boundary correction is singular at the anchor point "
                    "(nonzero derivative at the interval end)"
                )
            continue
        out[i] = math.fsum(c * d ** (k - alpha) for k, c in enumerate(coeffs))
    return out


def rl_from_caputo_left(
    caputo_values: GridFunction,
    e: expr_mod.ExprNode,
    a: float,
    order: FractionalOrder,
) -> GridFunction:
    """Convert left-Caputo samples to left Riemann-Liouville samples.

    Adds the boundary series sum x^(k)(a)/Gamma(k-alpha+1) (t-a)^(k-alpha);
    the two operators coincide exactly when all those derivatives vanish.
    """
    correction = _boundary_series(e, a, order, caputo_values.times - a)
    return GridFunction(
        times=caputo_values.times, values=caputo_values.values + correction
    )


def rl_from_caputo_right(
    caputo_values: GridFunction,
    e: expr_mod.ExprNode,
    b: float,
    order: FractionalOrder,
) -> GridFunction:
    """Right-side analogue of rl_from_caputo_left, with powers of (b-t)."""
    correction = _boundary_series(e, b, order, b - caputo_values.times)
    return GridFunction(
        times=caputo_values.times, values=caputo_values.values + correction
    )


def rl_integral(
    e: expr_mod.ExprNode,
    anchor: float,
    alpha: float,
    side: Side,
    grid: Sequence[float],
    cfg: QuadratureConfig | None = None,
) -> GridFunction:
    """Riemann-Liouville integral of order alpha > 0 on a grid.

    Left:  (1/Gamma(alpha)) int_a^t (t-tau)^(alpha-1) x(tau) dtau with
    anchor = a; right integrates from t up to anchor = b against
    (tau-t)^(alpha-1).  Integer alpha is allowed (plain iterated
    integral); the alpha < 1 kernel singularity is removed by the
    power substitution in the quadrature layer.
    """
    if alpha <= 0.0:
        raise ValueError(f"integral order must be positive, got {alpha!r}")
    if cfg is None:
        cfg = QuadratureConfig()
    grid = np.asarray(grid, dtype=float)
    lg = signed_log_gamma(alpha)
    inv_gamma = math.exp(-lg.log_abs)  # alpha > 0 so sign is +1

    values = np.empty(grid.size)
    for i, t in enumerate(grid):
        if side is Side.LEFT:
            raw = kernel_power_integral(
                lambda tau: expr_mod.evaluate(e, tau), anchor, t, alpha, cfg
            )
        else:
            # int_t^b (tau-t)^(alpha-1) x(tau) dtau via sigma = b - tau
            raw = kernel_power_integral(
                lambda sigma: expr_mod.evaluate(e, anchor - sigma),
                0.0,
                anchor - t,
                alpha,
                cfg,
            )
        values[i] = inv_gamma * raw
    return GridFunction(times=grid, values=values)
