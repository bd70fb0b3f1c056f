"""Flat key=value run configuration for the solve pipeline.

Four sections: [problem] (the equation), [approx] (expansion depth and
truncation), [solver] (integrator knobs), [output] (grid size, path).
Coefficient keys follow the derivative they multiply: coeff_x, coeff_xp,
coeff_xpp, ...; initial conditions are ic0..ic{n-1} with n = ceil(alpha).
Unknown sections or keys are rejected, and a rendered configuration
reparses to an identical RunConfig (round-trip property).

Example::

    [problem]
    alpha = 2.5
    a = 0
    b = 1
    frac_coeff = 1
    coeff_x = 1
    forcing = 61.9*t^3.5 + t^6
    ic0 = 0
    ic1 = 0
    ic2 = 0

    [approx]
    N = 50

    [solver]
    abs_tol = 1e-8

    [output]
    grid = 100
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass

from . import expr as expr_mod
from .expansion import FractionalOrder
from .solver import FDEProblem, SolverConfig

__all__ = ["ConfigError", "RunConfig", "parse_config", "render_config"]


class ConfigError(ValueError):
    """Malformed configuration: bad syntax, unknown key, or bad value."""


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters; forcing kept as source text so a
    rendered config reparses bit-for-bit."""

    alpha: float
    a: float
    b: float
    frac_coeff: float
    coeffs: tuple[float, ...]
    forcing: str
    ics: tuple[float, ...]
    m: int = 0
    N: int = 50
    abs_tol: float = 1e-8
    rel_tol: float = 1e-8
    epsilon_start: float | None = None
    grid: int = 100
    path: str | None = None

    def problem(self) -> FDEProblem:
        return FDEProblem(
            order=FractionalOrder(self.alpha),
            a=self.a,
            b=self.b,
            frac_coefficient=self.frac_coeff,
            integer_coefficients=self.coeffs,
            forcing=expr_mod.parse(self.forcing),
            initial_conditions=self.ics,
        )

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            abs_tol=self.abs_tol,
            rel_tol=self.rel_tol,
            epsilon_start=self.epsilon_start,
            grid_size=self.grid,
        )


def _coeff_key(j: int) -> str:
    return "coeff_x" + "p" * j


_REQUIRED_PROBLEM = ("alpha", "a", "b", "frac_coeff", "forcing")


def _get_float(section, key: str, where: str) -> float:
    raw = section[key]
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"[{where}] {key} = {raw!r} is not a number") from exc


def _get_int(section, key: str, where: str) -> int:
    raw = section[key]
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"[{where}] {key} = {raw!r} is not an integer") from exc


def parse_config(text: str) -> RunConfig:
    """Parse and validate configuration text; raises ConfigError."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keys are case-sensitive (N vs n)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"bad configuration syntax: {exc}") from exc

    known_sections = {"problem", "approx", "solver", "output"}
    for sec in cp.sections():
        if sec not in known_sections:
            raise ConfigError(f"unknown section [{sec}]")
    if not cp.has_section("problem"):
        raise ConfigError("missing required section [problem]")

    prob = cp["problem"]
    for key in _REQUIRED_PROBLEM:
        if key not in prob:
            raise ConfigError(f"[problem] is missing required key {key!r}")

    alpha = _get_float(prob, "alpha", "problem")
    try:
        n = FractionalOrder(alpha).n
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    allowed_problem = set(_REQUIRED_PROBLEM)
    allowed_problem.update(_coeff_key(j) for j in range(n))
    allowed_problem.update(f"ic{j}" for j in range(n))
    for key in prob:
        if key not in allowed_problem:
            raise ConfigError(f"unknown key {key!r} in [problem]")

    a = _get_float(prob, "a", "problem")
    b = _get_float(prob, "b", "problem")
    frac_coeff = _get_float(prob, "frac_coeff", "problem")
    forcing = prob["forcing"].strip()
    try:
        expr_mod.parse(forcing)
    except expr_mod.ParseError as exc:
        raise ConfigError(f"[problem] forcing does not parse: {exc}") from exc
    coeffs = tuple(
        _get_float(prob, _coeff_key(j), "problem") if _coeff_key(j) in prob else 0.0
        for j in range(n)
    )
    ics = tuple(
        _get_float(prob, f"ic{j}", "problem") if f"ic{j}" in prob else 0.0
        for j in range(n)
    )

    kwargs = {}
    if cp.has_section("approx"):
        approx = cp["approx"]
        for key in approx:
            if key not in ("m", "N"):
                raise ConfigError(f"unknown key {key!r} in [approx]")
        if "m" in approx:
            kwargs["m"] = _get_int(approx, "m", "approx")
        if "N" in approx:
            kwargs["N"] = _get_int(approx, "N", "approx")

    if cp.has_section("solver"):
        sol = cp["solver"]
        for key in sol:
            if key not in ("abs_tol", "rel_tol", "epsilon_start"):
                raise ConfigError(f"unknown key {key!r} in [solver]")
        if "abs_tol" in sol:
            kwargs["abs_tol"] = _get_float(sol, "abs_tol", "solver")
        if "rel_tol" in sol:
            kwargs["rel_tol"] = _get_float(sol, "rel_tol", "solver")
        if "epsilon_start" in sol:
            kwargs["epsilon_start"] = _get_float(sol, "epsilon_start", "solver")

    if cp.has_section("output"):
        out = cp["output"]
        for key in out:
            if key not in ("grid", "path"):
                raise ConfigError(f"unknown key {key!r} in [output]")
        if "grid" in out:
            kwargs["grid"] = _get_int(out, "grid", "output")
        if "path" in out:
            kwargs["path"] = out["path"].strip()

    cfg = RunConfig(
        alpha=alpha,
        a=a,
        b=b,
        frac_coeff=frac_coeff,
        coeffs=coeffs,
        forcing=forcing,
        ics=ics,
        **kwargs,
    )
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if not cfg.b > cfg.a:
        raise ConfigError(f"need b > a, got a = {cfg.a!r}, b = {cfg.b!r}")
    if cfg.frac_coeff == 0.0:
        raise ConfigError("frac_coeff must be nonzero")
    if cfg.m != 0:
        raise ConfigError(
            "the solve pipeline supports only m = 0 (the n initial "
            "conditions determine the state; deeper expansions would "
            "need conditions on higher derivatives)"
        )
    if cfg.N < 1:
        raise ConfigError(f"N must be >= 1, got {cfg.N}")
    if cfg.abs_tol <= 0.0 or cfg.rel_tol <= 0.0:
        raise ConfigError("tolerances must be positive")
    if cfg.epsilon_start is not None and not (
        0.0 < cfg.epsilon_start <= 1e-3 * (cfg.b - cfg.a)
    ):
        raise ConfigError(
            "epsilon_start must lie in (0, 1e-3*(b-a)]; "
            f"got {cfg.epsilon_start!r}"
        )
    if cfg.grid < 2:
        raise ConfigError(f"grid must be >= 2, got {cfg.grid}")
    if not all(math.isfinite(v) for v in (cfg.alpha, cfg.a, cfg.b, cfg.frac_coeff)):
        raise ConfigError("problem parameters must be finite")


def render_config(cfg: RunConfig) -> str:
    """Render a RunConfig as configuration text (inverse of parse_config)."""
    n = FractionalOrder(cfg.alpha).n
    buf = io.StringIO()
    buf.write("[problem]\n")
    buf.write(f"alpha = {cfg.alpha!r}\n")
    buf.write(f"a = {cfg.a!r}\n")
    buf.write(f"b = {cfg.b!r}\n")
    buf.write(f"frac_coeff = {cfg.frac_coeff!r}\n")
    for j in range(n):
        buf.write(f"{_coeff_key(j)} = {cfg.coeffs[j]!r}\n")
    buf.write(f"forcing = {cfg.forcing}\n")
    for j in range(n):
        buf.write(f"ic{j} = {cfg.ics[j]!r}\n")
    buf.write("\n[approx]\n")
    buf.write(f"m = {cfg.m}\n")
    buf.write(f"N = {cfg.N}\n")
    buf.write("\n[solver]\n")
    buf.write(f"abs_tol = {cfg.abs_tol!r}\n")
    buf.write(f"rel_tol = {cfg.rel_tol!r}\n")
    if cfg.epsilon_start is not None:
        buf.write(f"epsilon_start = {cfg.epsilon_start!r}\n")
    buf.write("\n[output]\n")
    buf.write(f"grid = {cfg.grid}\n")
    if cfg.path is not None:
        buf.write(f"path = {cfg.path}\n")
    return buf.getvalue()
