"""Integration helpers: an adaptive engine and weak-singularity handling.

Two kinds of integrals show up in this package:

* smooth integrands (moment functions, composition checks), handled by
  the adaptive Gauss-Kronrod engine from scipy or by fixed composite
  Gauss-Legendre panels when many related integrals share a grid;
* kernel integrals ``int_a^t (t - tau)^(q-1) f(tau) dtau`` whose kernel
  blows up at ``tau = t`` for q < 1.  The substitution ``s = (t - tau)^q``
  removes that singularity exactly: the integral becomes
  ``(1/q) * int_0^{(t-a)^q} f(t - s^(1/q)) ds`` with a bounded, smooth
  integrand wherever f is smooth.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from scipy import integrate

__all__ = [
    "QuadratureConfig",
    "QuadratureError",
    "adaptive_integral",
    "kernel_power_integral",
    "gauss_legendre_rule",
]


class QuadratureError(RuntimeError):
    """The adaptive engine did not converge within its subdivision cap."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and subdivision cap for the adaptive engine."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000

    def __post_init__(self) -> None:
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


def adaptive_integral(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    cfg: QuadratureConfig = QuadratureConfig(),
) -> float:
    """Integrate a scalar function over [lo, hi] adaptively."""
    if lo == hi:
        return 0.0
    out = integrate.quad(
        f,
        lo,
        hi,
        epsabs=cfg.abs_tol,
        epsrel=cfg.rel_tol,
        limit=cfg.max_subdivisions,
        full_output=1,
    )
    if len(out) > 3:
        # fourth element is the convergence warning message
        raise QuadratureError(
            f"adaptive quadrature on [{lo!r}, {hi!r}] failed: {out[3]}"
        )
    return float(out[0])


def kernel_power_integral(
    f: Callable[[float], float],
    a: float,
    t: float,
    q: float,
    cfg: QuadratureConfig = QuadratureConfig(),
) -> float:
    """Compute ``int_a^t (t - tau)^(q-1) * f(tau) dtau`` for q > 0.

    For q < 1 the kernel is weakly singular at tau = t and the power
    substitution is applied; for q >= 1 the kernel is bounded and the
    integral is evaluated directly.
    """
    if q <= 0.0:
        raise ValueError(f"kernel exponent q must be positive, got {q!r}")
    if t < a:
        raise ValueError(f"upper limit {t!r} below lower limit {a!r}")
    if t == a:
        return 0.0
    if q < 1.0:
        upper = (t - a) ** q
        inv_q = 1.0 / q

        def g(s: float) -> float:
            # s = 0 maps to tau = t; guard the 0^inv_q corner exactly
            tau = t - s ** inv_q if s > 0.0 else t
            return f(tau)

        return inv_q * adaptive_integral(g, 0.0, upper, cfg)

    def h(tau: float) -> float:
        base = t - tau
        if base <= 0.0:
            return 0.0
        return base ** (q - 1.0) * f(tau)

    return adaptive_integral(h, a, t, cfg)


@lru_cache(maxsize=8)
def gauss_legendre_rule(npts: int = 5) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the npts-point Gauss-Legendre rule on [-1, 1]."""
    nodes, weights = np.polynomial.legendre.leggauss(npts)
    return nodes, weights
