import math

import numpy as np
import pytest

from fracexpand.expansion import (
    ApproxParams,
    FractionalOrder,
    GridFunction,
    Side,
    SingularityError,
    caputo_expansion,
    coefficient_table,
    cumulative_moments,
    error_bound,
    rl_from_caputo_left,
    rl_from_caputo_right,
    rl_integral,
    weighted_moment_sum,
)
from fracexpand.expr import parse
from fracexpand.reference import caputo_power_exact, l2_grid_error
from fracexpand.special import gamma


def test_fractional_order_validation():
    assert FractionalOrder(0.5).n == 1
    assert FractionalOrder(1.5).n == 2
    assert FractionalOrder(2.5).n == 3
    assert FractionalOrder(1.9).n == 2
    for bad in (2.0, 1.0, 0.0, -0.5, 3.0 + 1e-12):
        with pytest.raises(ValueError):
            FractionalOrder(bad)


def test_approx_params_validation():
    ApproxParams(m=0, N=1)
    ApproxParams(m=1, N=2)
    with pytest.raises(ValueError):
        ApproxParams(m=1, N=1)  # needs N >= m + 1
    with pytest.raises(ValueError):
        ApproxParams(m=-1, N=5)


def test_grid_function_requires_increasing_times():
    with pytest.raises(ValueError):
        GridFunction(times=np.array([0.0, 1.0, 1.0]), values=np.zeros(3))
    with pytest.raises(ValueError):
        GridFunction(times=np.array([0.0, 2.0, 1.0]), values=np.zeros(3))


def test_smallest_coefficient_table():
    # alpha = 2.5, m = 0, N = 1: A_0 and B_1 both collapse to 1/Gamma(0.5)
    table = coefficient_table(FractionalOrder(2.5), ApproxParams(m=0, N=1))
    assert table.A.shape == (1,)
    assert table.B.shape == (1,)
    assert table.A[0] == pytest.approx(0.5641895835477558, rel=1e-12)
    assert table.B[0] == pytest.approx(1.0 / gamma(0.5), rel=1e-12)


def test_first_tail_coefficient_identity():
    # B_{m+1} always equals 1/Gamma(n - alpha), whatever m and N are
    rng = np.random.default_rng(101)
    for _ in range(100):
        alpha = float(rng.uniform(0.05, 4.0))
        if abs(alpha - round(alpha)) < 1e-3:
            continue
        m = int(rng.integers(0, 4))
        N = m + 1 + int(rng.integers(0, 60))
        order = FractionalOrder(alpha)
        table = coefficient_table(order, ApproxParams(m=m, N=N))
        expected = 1.0 / gamma(order.n - alpha)
        assert table.B[0] == pytest.approx(expected, rel=1e-12)


def test_right_side_sign_pattern():
    order = FractionalOrder(1.5)
    params = ApproxParams(m=2, N=8)
    left = coefficient_table(order, params, Side.LEFT)
    right = coefficient_table(order, params, Side.RIGHT)
    n = order.n
    for k in range(params.m + 1):
        assert right.A[k] == pytest.approx((-1.0) ** (n + k) * left.A[k], rel=1e-14)
    np.testing.assert_allclose(right.B, (-1.0) ** n * left.B, rtol=1e-14)


def test_cumulative_moments_power_oracle():
    # x = t^6, n = 2: V_k(t) = 30 t^(k+5) / (k+5)
    e = parse("t^6")
    order = FractionalOrder(1.5)
    grid = np.linspace(0.0, 1.0, 17)
    count = 6
    V = cumulative_moments(e, order, 0.0, 1.0, Side.LEFT, grid, count)
    for k in range(count):
        exact = 30.0 * grid ** (k + 5) / (k + 5)
        np.testing.assert_allclose(V[:, k], exact, rtol=1e-10, atol=1e-14)


def test_cumulative_moments_right_reflection():
    # right moments of (1-t)^6 on [0,1] mirror the left moments of t^6
    order = FractionalOrder(1.5)
    grid = np.linspace(0.0, 1.0, 13)
    left = cumulative_moments(
        parse("t^6"), order, 0.0, 1.0, Side.LEFT, grid, 4
    )
    right = cumulative_moments(
        parse("(1 - t)^6"), order, 0.0, 1.0, Side.RIGHT, grid, 4
    )
    np.testing.assert_allclose(right, left[::-1], rtol=1e-12, atol=1e-15)


def test_weighted_moment_sum_matches_naive_and_survives_tiny_delta():
    coeffs = np.array([0.7, -1.3, 2.1, -0.4])
    exponents = np.array([-0.5, -1.5, -2.5, -3.5])
    moments = np.array([1e-3, -2e-5, 3e-7, 0.0])
    delta = 0.2
    naive = sum(
        c * delta**p * v for c, p, v in zip(coeffs, exponents, moments)
    )
    got = weighted_moment_sum(coeffs, exponents, delta, moments)
    assert got == pytest.approx(naive, rel=1e-13)

    # a delta whose power balances the moment: fine in log space
    tiny = 1e-80
    balanced = np.array([0.0, 0.0, 0.0, tiny**3.5])
    out = weighted_moment_sum(coeffs, exponents, tiny, balanced)
    assert out == pytest.approx(-0.4, rel=1e-10)

    # delta^-3.5 alone overflows doubles here, so a naive product would die
    # on the way to a representable result; the log-space product does not
    overflow_delta = 1e-100
    with pytest.raises(OverflowError):
        overflow_delta ** -3.5
    out = weighted_moment_sum(
        coeffs, exponents, overflow_delta, np.array([0.0, 0.0, 0.0, 1e-250])
    )
    assert math.isfinite(out)
    assert out == pytest.approx(-0.4e100, rel=1e-10)

    assert weighted_moment_sum(coeffs, exponents, 0.0, moments) == 0.0
    assert weighted_moment_sum(coeffs, exponents, delta, np.zeros(4)) == 0.0


def test_expansion_converges_to_power_rule():
    e = parse("t^6")
    order = FractionalOrder(1.5)
    grid = np.linspace(0.0, 1.0, 41)
    exact = GridFunction(
        times=grid,
        values=np.array(
            [caputo_power_exact(7.0, order, 0.0, Side.LEFT, t) for t in grid]
        ),
    )
    errors = []
    finest = None
    for N in (10, 15, 25, 50):
        approx = caputo_expansion(e, 0.0, 1.0, order, ApproxParams(m=1, N=N), Side.LEFT, grid)
        errors.append(l2_grid_error(approx, exact))
        finest = approx
    assert errors == sorted(errors, reverse=True), errors
    assert float(np.max(np.abs(finest.values - exact.values))) < 5e-3


def test_expansion_is_linear():
    order = FractionalOrder(1.5)
    params = ApproxParams(m=1, N=20)
    grid = np.linspace(0.0, 1.0, 21)
    f = parse("t^6")
    g = parse("sin(t)")
    combo = parse("2 * t^6 + 3 * sin(t)")
    vf = caputo_expansion(f, 0.0, 1.0, order, params, Side.LEFT, grid).values
    vg = caputo_expansion(g, 0.0, 1.0, order, params, Side.LEFT, grid).values
    vc = caputo_expansion(combo, 0.0, 1.0, order, params, Side.LEFT, grid).values
    scale = np.max(np.abs(vc)) or 1.0
    np.testing.assert_allclose(vc, 2.0 * vf + 3.0 * vg, atol=1e-10 * scale)


def test_low_degree_polynomials_vanish_exactly():
    # n = 2 for alpha = 1.5, so any polynomial of degree <= 1 has zero
    # derivative of every order the operator sees: the result is exactly 0
    order = FractionalOrder(1.5)
    params = ApproxParams(m=1, N=30)
    grid = np.linspace(0.0, 2.0, 11)
    for src in ("2*t + 3", "t", "5"):
        out = caputo_expansion(
            parse(src), 0.0, 2.0, order, params, Side.LEFT, grid
        )
        assert np.all(out.values == 0.0), src


def test_left_right_reflection_symmetry():
    # reflecting the function maps the left operator onto the right one
    order = FractionalOrder(2.5)
    params = ApproxParams(m=1, N=40)
    grid = np.linspace(0.0, 1.0, 21)
    left = caputo_expansion(
        parse("t^6"), 0.0, 1.0, order, params, Side.LEFT, grid
    )
    right = caputo_expansion(
        parse("(1 - t)^6"), 0.0, 1.0, order, params, Side.RIGHT, grid
    )
    np.testing.assert_allclose(right.values[::-1], left.values, rtol=0, atol=1e-9)


def test_expansion_anchor_values_are_exact_zero():
    order = FractionalOrder(1.5)
    params = ApproxParams(m=1, N=25)
    grid = np.linspace(0.0, 1.0, 5)
    left = caputo_expansion(parse("t^6"), 0.0, 1.0, order, params, Side.LEFT, grid)
    assert left.values[0] == 0.0
    right = caputo_expansion(
        parse("(1 - t)^6"), 0.0, 1.0, order, params, Side.RIGHT, grid
    )
    assert right.values[-1] == 0.0


def test_expansion_rejects_grid_outside_interval():
    order = FractionalOrder(1.5)
    params = ApproxParams(m=0, N=5)
    with pytest.raises(ValueError):
        caputo_expansion(
            parse("t"), 0.0, 1.0, order, params, Side.LEFT, [0.5, 1.5]
        )


def test_error_bound_values_and_scaling():
    order = FractionalOrder(1.5)
    b50 = error_bound(order, ApproxParams(m=1, N=50), 0.0, 1.0, M=360.0)
    assert b50 == pytest.approx(21.7132254953489, rel=1e-10)

    # the bound scales like N^-r with r = n + m - alpha
    b100 = error_bound(order, ApproxParams(m=1, N=100), 0.0, 1.0, M=360.0)
    r = 2 + 1 - 1.5
    assert b100 / b50 == pytest.approx(0.5**r, rel=1e-12)

    assert error_bound(order, ApproxParams(m=1, N=50), 0.0, 0.0, M=360.0) == 0.0
    with pytest.raises(ValueError):
        error_bound(order, ApproxParams(m=1, N=50), 0.0, -1.0, M=360.0)
    with pytest.raises(ValueError):
        error_bound(order, ApproxParams(m=1, N=50), 0.0, 1.0, M=-1.0)


def test_rl_bridge_for_constants():
    # Caputo kills constants; the bridge restores c t^-alpha / Gamma(1-alpha)
    order = FractionalOrder(0.5)
    grid = np.linspace(0.25, 1.0, 7)
    zeros = GridFunction(times=grid, values=np.zeros(grid.size))
    rl = rl_from_caputo_left(zeros, parse("3"), 0.0, order)
    expected = 3.0 / gamma(0.5) * grid**-0.5
    np.testing.assert_allclose(rl.values, expected, rtol=1e-13)

    rl_r = rl_from_caputo_right(zeros, parse("3"), 2.0, order)
    expected_r = 3.0 / gamma(0.5) * (2.0 - grid) ** -0.5
    np.testing.assert_allclose(rl_r.values, expected_r, rtol=1e-13)


def test_rl_bridge_singular_at_anchor():
    order = FractionalOrder(0.5)
    grid = np.linspace(0.0, 1.0, 5)
    zeros = GridFunction(times=grid, values=np.zeros(grid.size))
    with pytest.raises(SingularityError):
        rl_from_caputo_left(zeros, parse("3"), 0.0, order)
    # but a function vanishing at the anchor is fine there
    out = rl_from_caputo_left(zeros, parse("t"), 0.0, order)
    assert out.values[0] == 0.0


def test_rl_integral_power_rule():
    # I^alpha t^beta = Gamma(beta+1)/Gamma(beta+alpha+1) t^(beta+alpha)
    grid = np.linspace(0.0, 1.0, 9)
    e = parse("t^3")
    for alpha in (0.5, 1.5, 2.0):
        out = rl_integral(e, 0.0, alpha, Side.LEFT, grid)
        expected = gamma(4.0) / gamma(4.0 + alpha) * grid ** (3.0 + alpha)
        np.testing.assert_allclose(out.values, expected, rtol=1e-9, atol=1e-12)

    out = rl_integral(parse("(1 - t)^3"), 1.0, 0.5, Side.RIGHT, grid)
    expected = gamma(4.0) / gamma(4.5) * (1.0 - grid) ** 3.5
    np.testing.assert_allclose(out.values, expected, rtol=1e-9, atol=1e-12)

    with pytest.raises(ValueError):
        rl_integral(e, 0.0, 0.0, Side.LEFT, grid)
    with pytest.raises(ValueError):
        rl_integral(e, 0.0, -0.5, Side.LEFT, grid)
