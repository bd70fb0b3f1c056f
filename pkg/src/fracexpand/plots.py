"""Figure rendering for the CLI report paths.

Every subcommand accepts --plot <file>; these helpers draw the matching
figure next to the delimited output.  The Agg backend is forced so the
CLI works headless; the output format follows the file extension
(anything matplotlib's savefig accepts: .png, .pdf, .svg, ...).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = [
    "save_derivative_figure",
    "save_solution_figure",
    "save_convergence_figure",
    "save_comparison_figure",
]


def save_derivative_figure(
    path: str,
    times: np.ndarray,
    approx: np.ndarray,
    direct: np.ndarray,
    exact: np.ndarray | None,
    bound: np.ndarray,
) -> None:
    """Approximation vs oracle curves, with the truncation bound below."""
    fig, (ax_top, ax_bot) = plt.subplots(
        2, 1, figsize=(7.0, 6.0), sharex=True, height_ratios=[2, 1]
    )
    ax_top.plot(times, approx, label="expansion", lw=1.8)
    ax_top.plot(times, direct, label="direct quadrature", ls="--", lw=1.2)
    if exact is not None:
        ax_top.plot(times, exact, label="analytic", ls=":", lw=1.2)
    ax_top.set_ylabel("derivative value")
    ax_top.legend()
    ax_top.grid(alpha=0.3)

    err = np.abs(approx - direct)
    ax_bot.semilogy(times, np.maximum(err, 1e-300), label="|expansion - direct|")
    ax_bot.semilogy(times, np.maximum(bound, 1e-300), label="bound", ls="--")
    # both curves vanish at the anchor; keep the log axis on the useful range
    top = float(max(err.max(), bound.max(), 1e-300))
    ax_bot.set_ylim(bottom=top * 1e-12, top=top * 10.0)
    ax_bot.set_xlabel("t")
    ax_bot.set_ylabel("error")
    ax_bot.legend()
    ax_bot.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_solution_figure(
    path: str,
    times: np.ndarray,
    x: np.ndarray,
    reference: np.ndarray | None = None,
) -> None:
    """Solved trajectory, optionally against a reference curve."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.plot(times, x, label="solution", lw=1.8)
    if reference is not None:
        ax.plot(times, reference, label="reference", ls="--", lw=1.2)
    ax.set_xlabel("t")
    ax.set_ylabel("x(t)")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_convergence_figure(
    path: str, param_name: str, values: np.ndarray, errors: np.ndarray
) -> None:
    """Error against the swept parameter, log-log."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.loglog(values, np.maximum(errors, 1e-300), marker="o")
    ax.set_xlabel(param_name)
    ax.set_ylabel("error")
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_comparison_figure(
    path: str,
    times: np.ndarray,
    expansion: np.ndarray,
    sousa: np.ndarray,
    exact: np.ndarray | None,
) -> None:
    """Expansion vs finite-difference scheme (and analytic curve if known)."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.plot(times, expansion, label="expansion", lw=1.8)
    ax.plot(times, sousa, label="finite differences", ls="--", lw=1.2)
    if exact is not None:
        ax.plot(times, exact, label="analytic", ls=":", lw=1.2)
    ax.set_xlabel("t")
    ax.set_ylabel("derivative value")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
