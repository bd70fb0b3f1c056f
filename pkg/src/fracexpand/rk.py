"""Adaptive embedded Runge-Kutta integrator (Dormand-Prince 5(4)).

A plain explicit DOPRI pair with FSAL, PI step-size control and cubic
Hermite dense output.  Deterministic by construction: no randomness, no
threading, pure float64 arithmetic, so identical inputs give bitwise
identical trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["SolverError", "DenseSolution", "integrate_ode"]

Rhs = Callable[[float, np.ndarray], np.ndarray]


class SolverError(RuntimeError):
    """Integration failed: step-count cap hit or the step size underflowed."""


# Butcher tableau (Dormand & Prince, order 5(4), 7 stages, FSAL)
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
# 5th-order weights (row 7 of A: the propagated solution, FSAL)
_B5 = _A[6]
# difference between 5th- and embedded 4th-order weights, for the error estimate
_E = np.array(
    [
        71 / 57600,
        0.0,
        -71 / 16695,
        71 / 1920,
        -17253 / 339200,
        22 / 525,
        -1 / 40,
    ]
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_ORDER_EXP = 1.0 / 5.0  # error-control exponent base for a 4th-order estimate
_STEP_UNDERFLOW = 1e-14  # relative to the span length


class DenseSolution:
    """Accepted steps plus derivative samples; interpolates in between.

    Interpolation is cubic Hermite on each accepted step (values and
    slopes at both ends), i.e. locally O(h^4) accurate -- consistent
    with the embedded pair's error control.
    """

    def __init__(self, ts: np.ndarray, ys: np.ndarray, fs: np.ndarray):
        self.ts = ts
        self.ys = ys
        self.fs = fs

    def sample(self, times: np.ndarray) -> np.ndarray:
        """Evaluate the interpolant at the given times (shape: len x dim)."""
        times = np.asarray(times, dtype=float)
        if times.min() < self.ts[0] or times.max() > self.ts[-1]:
            raise ValueError("interpolation requested outside the solved span")
        out = np.empty((times.size, self.ys.shape[1]))
        # locate each query in its accepted step [ts[i], ts[i+1]]
        idx = np.searchsorted(self.ts, times, side="right") - 1
        idx = np.clip(idx, 0, self.ts.size - 2)
        for row, (t, i) in enumerate(zip(times, idx)):
            h = self.ts[i + 1] - self.ts[i]
            s = (t - self.ts[i]) / h
            h00 = (1.0 + 2.0 * s) * (1.0 - s) ** 2
            h10 = s * (1.0 - s) ** 2
            h01 = s * s * (3.0 - 2.0 * s)
            h11 = s * s * (s - 1.0)
            out[row] = (
                h00 * self.ys[i]
                + h * h10 * self.fs[i]
                + h01 * self.ys[i + 1]
                + h * h11 * self.fs[i + 1]
            )
        return out

    def __call__(self, t: float) -> np.ndarray:
        return self.sample(np.array([t]))[0]


def _error_norm(err: np.ndarray, scale: np.ndarray) -> float:
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _initial_step(
    rhs: Rhs,
    t0: float,
    y0: np.ndarray,
    f0: np.ndarray,
    t1: float,
    abs_tol: float,
    rel_tol: float,
) -> float:
    """Cheap starting-step heuristic based on the first two derivative samples."""
    scale = abs_tol + rel_tol * np.abs(y0)
    d0 = _error_norm(y0, scale)
    d1 = _error_norm(f0, scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, abs(t1 - t0))
    y1 = y0 + h0 * f0
    f1 = rhs(t0 + h0, y1)
    d2 = _error_norm(f1 - f0, scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** _ORDER_EXP
    return min(100.0 * h0, h1, abs(t1 - t0))


def integrate_ode(
    rhs: Rhs,
    t_span: tuple[float, float],
    y0: np.ndarray,
    abs_tol: float = 1e-8,
    rel_tol: float = 1e-8,
    max_steps: int = 100_000,
) -> DenseSolution:
    """Integrate y' = rhs(t, y) over t_span with adaptive error control.

    The per-step local error estimate is kept below
    abs_tol + rel_tol * |y| componentwise (RMS-normed); step sizes are
    chosen by a PI controller.  Raises SolverError if max_steps is
    exhausted or the step size collapses below 1e-14 of the span.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValueError(f"need t_span[1] > t_span[0], got {t_span!r}")
    y = np.asarray(y0, dtype=float).copy()
    if y.ndim != 1:
        raise ValueError("state must be a 1-d vector")

    t = t0
    f = np.asarray(rhs(t, y), dtype=float)
    h = _initial_step(rhs, t0, y, f, t1, abs_tol, rel_tol)
    h_min = _STEP_UNDERFLOW * (t1 - t0)

    ts = [t]
    ys = [y.copy()]
    fs = [f.copy()]
    k = np.empty((7, y.size))
    err_prev = 1e-4
    steps = 0

    while t < t1:
        if steps >= max_steps:
            raise SolverError(f"step cap {max_steps} exceeded at t = {t!r}")
        if h < h_min:
            raise SolverError(f"step size underflow at t = {t!r}")
        last = h >= t1 - t
        if last:
            h = t1 - t

        k[0] = f
        for i in range(1, 7):
            yi = y + h * (_A[i] @ k[:i])
            k[i] = rhs(t + _C[i] * h, yi)
        y_new = y + h * (_B5 @ k[:6])  # b5[6] = 0 for the propagated solution
        # FSAL: stage 7 was evaluated at (t + h, y_new)
        err_vec = h * (_E @ k)
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = _error_norm(err_vec, scale)

        steps += 1
        if not math.isfinite(err):
            h *= _MIN_FACTOR
            continue
        if err <= 1.0:
            t = t1 if last else t + h  # land exactly on the endpoint
            y = y_new
            f = k[6]
            ts.append(t)
            ys.append(y.copy())
            fs.append(f.copy())
            # PI controller (accepted step)
            err = max(err, 1e-10)
            factor = _SAFETY * err ** (-0.7 * _ORDER_EXP) * err_prev ** (0.4 * _ORDER_EXP)
            h *= min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
            err_prev = err
        else:
            # rejected: shrink without the integral-gain boost
            factor = _SAFETY * err ** (-_ORDER_EXP)
            h *= min(1.0, max(_MIN_FACTOR, factor))

    return DenseSolution(np.array(ts), np.array(ys), np.array(fs))
