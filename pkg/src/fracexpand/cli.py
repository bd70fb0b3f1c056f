"""Command-line front end.

Subcommands:

* ``deriv``       -- fractional derivative of an expression along a grid
* ``solve``       -- solve a Caputo initial-value problem
* ``convergence`` -- sweep the truncation N (or depth m) and report errors
* ``compare``     -- expansion vs the finite-difference scheme

Exit codes: 0 success, 2 usage/parse error, 3 numeric failure, 4 solver
failure.  CSV output uses 17 significant digits, '.' decimals, LF line
endings, and always includes a header row.  Every subcommand takes
``--plot <file>`` to render a figure next to the delimited output.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Sequence

import numpy as np

from . import expr as expr_mod
from .config import ConfigError, RunConfig, parse_config, render_config
from .expansion import (
    ApproxParams,
    FractionalOrder,
    GridFunction,
    Side,
    SingularityError,
    caputo_expansion,
    error_bound,
)
from .quadrature import QuadratureError
from .reference import caputo_direct, caputo_power_exact, l2_grid_error, sousa_scheme
from .rk import SolverError
from .solver import solve_fde, successive_consistency
from .special import GammaPoleError

__all__ = ["main"]


def _fmt(v: float) -> str:
    return "%.17g" % v


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as handle:
            handle.write(text)


def _write_csv(path: str | None, header: Sequence[str], columns: Sequence[np.ndarray]) -> None:
    rows = zip(*columns)
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    _write_text(path, "\n".join(lines) + "\n")


def _ensure_finite(name: str, values: np.ndarray) -> None:
    if not np.all(np.isfinite(values)):
        raise ArithmeticError(f"{name} contains non-finite values")


def _estimate_derivative_bound(
    e: expr_mod.ExprNode, order_n: int, m: int, a: float, b: float
) -> float:
    """Sampled max of |x^(n+m+1)| on [a, b], inflated by a safety factor.

    Dense sampling can only under-estimate the true max; the 1.05
    inflation covers the gap for the smooth expressions this CLI
    accepts.
    """
    top = expr_mod.differentiate(e, order_n + m + 1)
    samples = expr_mod.evaluate_array(top, np.linspace(a, b, 1000))
    return 1.05 * float(np.max(np.abs(samples)))


def _parse_float_list(raw: str, what: str) -> tuple[float, ...]:
    try:
        return tuple(float(piece) for piece in raw.split(","))
    except ValueError as exc:
        raise ValueError(f"{what} must be a comma-separated number list") from exc


# --- deriv -------------------------------------------------------------------

def cmd_deriv(args: argparse.Namespace) -> int:
    e = expr_mod.parse(args.expr)
    order = FractionalOrder(args.alpha)
    params = ApproxParams(m=args.m, N=args.N)
    a, b = args.a, args.b
    if not b > a:
        raise ValueError(f"need b > a, got a = {a!r}, b = {b!r}")
    side = Side(args.side)
    anchor = a if side is Side.LEFT else b

    grid = np.linspace(a, b, args.grid)
    approx = caputo_expansion(e, a, b, order, params, side, grid).values
    direct = np.array(
        [caputo_direct(e, order, anchor, side, float(t)) for t in grid]
    )
    exact = None
    if args.exact_beta is not None:
        exact = np.array(
            [
                caputo_power_exact(args.exact_beta, order, anchor, side, float(t))
                for t in grid
            ]
        )

    m_bound = _estimate_derivative_bound(e, order.n, args.m, a, b)
    deltas = grid - a if side is Side.LEFT else b - grid
    bound = np.array(
        [error_bound(order, params, 0.0, float(d), m_bound) for d in deltas]
    )
    abs_error = np.abs(approx - direct)

    header = ["t", "approx"]
    columns = [grid, approx]
    if exact is not None:
        header.append("exact")
        columns.append(exact)
    header.extend(["direct_quadrature", "abs_error", "bound"])
    columns.extend([direct, abs_error, bound])
    for name, col in zip(header, columns):
        _ensure_finite(name, col)
    _write_csv(args.out, header, columns)

    if args.plot:
        from .plots import save_derivative_figure

        save_derivative_figure(args.plot, grid, approx, direct, exact, bound)
    return 0


# --- solve -------------------------------------------------------------------

def _solve_config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.config is not None:
        with open(args.config) as handle:
            cfg = parse_config(handle.read())
        overrides = {}
        if args.N is not None:
            overrides["N"] = args.N
        if args.grid is not None:
            overrides["grid"] = args.grid
        if overrides:
            from dataclasses import replace

            cfg = replace(cfg, **overrides)
        return cfg

    missing = [
        flag
        for flag, value in (
            ("--alpha", args.alpha),
            ("--frac-coeff", args.frac_coeff),
            ("--forcing", args.forcing),
        )
        if value is None
    ]
    if missing:
        raise ValueError(
            "without --config, " + ", ".join(missing) + " must be given"
        )
    n = FractionalOrder(args.alpha).n
    coeffs = _parse_float_list(args.coeffs, "--coeffs") if args.coeffs else (0.0,) * n
    ics = _parse_float_list(args.ics, "--ics") if args.ics else (0.0,) * n
    if len(coeffs) != n:
        raise ValueError(f"--coeffs needs {n} entries (c_0..c_{n - 1})")
    if len(ics) != n:
        raise ValueError(f"--ics needs {n} entries (x(a)..x^({n - 1})(a))")
    kwargs = {}
    if args.N is not None:
        kwargs["N"] = args.N
    if args.grid is not None:
        kwargs["grid"] = args.grid
    if args.abs_tol is not None:
        kwargs["abs_tol"] = args.abs_tol
    if args.rel_tol is not None:
        kwargs["rel_tol"] = args.rel_tol
    if args.epsilon_start is not None:
        kwargs["epsilon_start"] = args.epsilon_start
    return RunConfig(
        alpha=args.alpha,
        a=args.a,
        b=args.b,
        frac_coeff=args.frac_coeff,
        coeffs=coeffs,
        forcing=args.forcing,
        ics=ics,
        **kwargs,
    )


def cmd_solve(args: argparse.Namespace) -> int:
    cfg = _solve_config_from_args(args)
    if args.print_config:
        sys.stdout.write(render_config(cfg))
        return 0

    problem = cfg.problem()
    solution = solve_fde(problem, cfg.N, cfg.solver_config())
    n = problem.order.n

    header = ["t"] + ["x" + "p" * j for j in range(n)]
    columns = [solution.times] + [solution.states[:, j] for j in range(n)]
    for name, col in zip(header, columns):
        _ensure_finite(name, col)
    out_path = args.out if args.out is not None else cfg.path
    _write_csv(out_path, header, columns)

    reference_values = None
    if args.reference is not None:
        ref = expr_mod.parse(args.reference)
        reference_values = expr_mod.evaluate_array(ref, solution.times)
        err = l2_grid_error(
            solution.x, GridFunction(times=solution.times, values=reference_values)
        )
        line = f"l2_error = {_fmt(err)}\n"
        # keep the CSV stream clean when it goes to stdout
        (sys.stderr if out_path is None else sys.stdout).write(line)

    if args.plot:
        from .plots import save_solution_figure

        save_solution_figure(
            args.plot, solution.times, solution.states[:, 0], reference_values
        )
    return 0


# --- convergence ---------------------------------------------------------------

def cmd_convergence(args: argparse.Namespace) -> int:
    values = [int(piece) for piece in args.values.split(",")]
    if not values:
        raise ValueError("--values must list at least one integer")

    errors = []
    if args.config is not None:
        if args.sweep == "m":
            raise ValueError("the m sweep applies to --expr mode only")
        with open(args.config) as handle:
            cfg = parse_config(handle.read())
        problem = cfg.problem()
        solver_cfg = cfg.solver_config()
        for value in values:
            errors.append(successive_consistency(problem, value, solver_cfg))
    else:
        if args.expr is None or args.alpha is None:
            raise ValueError("need --expr and --alpha (or --config)")
        e = expr_mod.parse(args.expr)
        order = FractionalOrder(args.alpha)
        a, b = args.a, args.b
        if not b > a:
            raise ValueError(f"need b > a, got a = {a!r}, b = {b!r}")
        side = Side(args.side)
        anchor = a if side is Side.LEFT else b
        grid = np.linspace(a, b, args.grid)
        if args.exact_beta is not None:
            oracle_vals = np.array(
                [
                    caputo_power_exact(args.exact_beta, order, anchor, side, float(t))
                    for t in grid
                ]
            )
        else:
            oracle_vals = np.array(
                [caputo_direct(e, order, anchor, side, float(t)) for t in grid]
            )
        oracle = GridFunction(times=grid, values=oracle_vals)
        for value in values:
            if args.sweep == "N":
                params = ApproxParams(m=args.m, N=value)
            else:
                params = ApproxParams(m=value, N=args.N)
            approx = caputo_expansion(e, a, b, order, params, side, grid)
            errors.append(l2_grid_error(approx, oracle))

    lines = [f"{args.sweep} error"]
    lines.extend(f"{v} {_fmt(err)}" for v, err in zip(values, errors))
    if args.sweep == "N" and len(values) >= 2 and all(e > 0.0 for e in errors):
        slope = float(
            np.polyfit(np.log(np.asarray(values, float)), np.log(errors), 1)[0]
        )
        lines.append(f"slope {_fmt(slope)}")
    _write_text(args.out, "\n".join(lines) + "\n")

    if args.plot:
        from .plots import save_convergence_figure

        save_convergence_figure(
            args.plot, args.sweep, np.asarray(values, float), np.asarray(errors)
        )
    return 0


# --- compare -------------------------------------------------------------------

def cmd_compare(args: argparse.Namespace) -> int:
    e = expr_mod.parse(args.expr)
    if not 1.0 < args.alpha < 2.0:
        raise ValueError(
            f"the finite-difference column needs alpha in (1, 2), got {args.alpha!r}"
        )
    order = FractionalOrder(args.alpha)
    params = ApproxParams(m=args.m, N=args.N)
    a, b = args.a, args.b
    if not b > a:
        raise ValueError(f"need b > a, got a = {a!r}, b = {b!r}")
    if args.dt <= 0.0:
        raise ValueError(f"--dt must be positive, got {args.dt!r}")

    n_steps = int(math.floor((b - a) / args.dt + 1e-12))
    if n_steps < 2:
        raise ValueError("--dt leaves fewer than two steps on [a, b]")
    times = a + args.dt * np.arange(n_steps + 1)
    samples = GridFunction(times=times, values=expr_mod.evaluate_array(e, times))
    sousa = sousa_scheme(samples, args.alpha)

    out_times = sousa.times
    expansion = caputo_expansion(
        e, a, float(times[-1]), order, params, Side.LEFT, out_times
    ).values
    exact = None
    if args.exact_beta is not None:
        exact = np.array(
            [
                caputo_power_exact(args.exact_beta, order, a, Side.LEFT, float(t))
                for t in out_times
            ]
        )

    header = ["t", "expansion", "sousa"]
    columns = [out_times, expansion, sousa.values]
    if exact is not None:
        header.append("exact")
        columns.append(exact)
    for name, col in zip(header, columns):
        _ensure_finite(name, col)
    _write_csv(args.out, header, columns)

    if args.plot:
        from .plots import save_comparison_figure

        save_comparison_figure(args.plot, out_times, expansion, sousa.values, exact)
    return 0


# --- parser / dispatch -----------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracexpand",
        description="Fractional derivatives by integer-order series expansion.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    deriv = sub.add_parser(
        "deriv", help="evaluate a Caputo derivative approximation on a grid"
    )
    deriv.add_argument("--expr", required=True, help="function of t, e.g. 't^6'")
    deriv.add_argument("--alpha", type=float, required=True, help="fractional order")
    deriv.add_argument("--a", type=float, default=0.0, help="interval start")
    deriv.add_argument("--b", type=float, default=1.0, help="interval end")
    deriv.add_argument("--side", choices=["left", "right"], default="left")
    deriv.add_argument("--m", type=int, default=1, help="expansion depth")
    deriv.add_argument("--N", type=int, default=50, help="series truncation")
    deriv.add_argument("--grid", type=int, default=100, help="output grid points")
    deriv.add_argument(
        "--exact-beta",
        type=float,
        default=None,
        help="expression is the power (t-a)^(beta-1): add the analytic column",
    )
    deriv.add_argument("--out", default=None, help="CSV path (default stdout)")
    deriv.add_argument("--plot", default=None, help="render a figure to this file")
    deriv.set_defaults(run=cmd_deriv)

    solve = sub.add_parser("solve", help="solve a Caputo initial-value problem")
    solve.add_argument("--config", default=None, help="problem configuration file")
    solve.add_argument("--alpha", type=float, default=None)
    solve.add_argument("--a", type=float, default=0.0)
    solve.add_argument("--b", type=float, default=1.0)
    solve.add_argument("--frac-coeff", type=float, default=None)
    solve.add_argument(
        "--coeffs", default=None, help="comma list c_0,..,c_{n-1} on x..x^(n-1)"
    )
    solve.add_argument("--forcing", default=None, help="forcing f(t)")
    solve.add_argument("--ics", default=None, help="comma list x(a),..,x^(n-1)(a)")
    solve.add_argument("--N", type=int, default=None, help="series truncation")
    solve.add_argument("--grid", type=int, default=None, help="output grid points")
    solve.add_argument("--abs-tol", type=float, default=None)
    solve.add_argument("--rel-tol", type=float, default=None)
    solve.add_argument("--epsilon-start", type=float, default=None)
    solve.add_argument(
        "--reference", default=None, help="expression to compare the solution against"
    )
    solve.add_argument(
        "--print-config",
        action="store_true",
        help="echo the effective configuration and exit",
    )
    solve.add_argument("--out", default=None, help="CSV path (default stdout)")
    solve.add_argument("--plot", default=None, help="render a figure to this file")
    solve.set_defaults(run=cmd_solve)

    conv = sub.add_parser(
        "convergence", help="error table over a sweep of N (or m)"
    )
    conv.add_argument("--sweep", choices=["N", "m"], required=True)
    conv.add_argument("--values", required=True, help="comma list, e.g. 10,15,25,50")
    conv.add_argument("--expr", default=None, help="function of t (expression mode)")
    conv.add_argument("--alpha", type=float, default=None)
    conv.add_argument("--a", type=float, default=0.0)
    conv.add_argument("--b", type=float, default=1.0)
    conv.add_argument("--side", choices=["left", "right"], default="left")
    conv.add_argument("--m", type=int, default=1, help="fixed depth for the N sweep")
    conv.add_argument(
        "--N", type=int, default=50, help="fixed truncation for the m sweep"
    )
    conv.add_argument("--grid", type=int, default=100)
    conv.add_argument("--exact-beta", type=float, default=None)
    conv.add_argument(
        "--config", default=None, help="problem mode: sweep the solver truncation"
    )
    conv.add_argument("--out", default=None, help="table path (default stdout)")
    conv.add_argument("--plot", default=None, help="render a figure to this file")
    conv.set_defaults(run=cmd_convergence)

    comp = sub.add_parser(
        "compare", help="expansion vs finite-difference discretization"
    )
    comp.add_argument("--expr", required=True)
    comp.add_argument(
        "--alpha", type=float, required=True, help="order, must lie in (1, 2)"
    )
    comp.add_argument("--a", type=float, default=0.0)
    comp.add_argument("--b", type=float, default=1.0)
    comp.add_argument("--dt", type=float, default=0.01, help="uniform sample step")
    comp.add_argument("--m", type=int, default=1)
    comp.add_argument("--N", type=int, default=50)
    comp.add_argument("--exact-beta", type=float, default=None)
    comp.add_argument("--out", default=None, help="CSV path (default stdout)")
    comp.add_argument("--plot", default=None, help="render a figure to this file")
    comp.set_defaults(run=cmd_compare)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles --help (0) and usage errors (2)
        return int(exc.code or 0)

    try:
        return args.run(args)
    except (expr_mod.ParseError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (
        GammaPoleError,
        expr_mod.EvalError,
        SingularityError,
        QuadratureError,
        ArithmeticError,
    ) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
