import math

import numpy as np
import pytest

from fracexpand.expansion import FractionalOrder, GridFunction, Side
from fracexpand.expr import parse
from fracexpand.reference import (
    caputo_direct,
    caputo_power_exact,
    l2_grid_error,
    sousa_scheme,
)
from fracexpand.special import gamma


def test_power_rule_left():
    order = FractionalOrder(1.5)
    # x = t^6 is (t-0)^(beta-1) with beta = 7
    t = 0.8
    expected = gamma(7.0) / gamma(5.5) * t**4.5
    assert caputo_power_exact(7.0, order, 0.0, Side.LEFT, t) == pytest.approx(
        expected, rel=1e-13
    )
    assert caputo_power_exact(7.0, order, 0.0, Side.LEFT, 0.0) == 0.0


def test_power_rule_right():
    order = FractionalOrder(2.5)
    t = 0.3
    expected = gamma(7.0) / gamma(4.5) * (1.0 - t) ** 3.5
    assert caputo_power_exact(7.0, order, 1.0, Side.RIGHT, t) == pytest.approx(
        expected, rel=1e-13
    )
    with pytest.raises(ValueError):
        caputo_power_exact(7.0, order, 1.0, Side.RIGHT, 1.5)
    with pytest.raises(ValueError):
        caputo_power_exact(2.0, order, 1.0, Side.RIGHT, 0.5)  # beta <= n


def test_direct_quadrature_matches_power_rule():
    ts = np.linspace(0.05, 1.0, 20)
    for beta in (4.0, 5.5, 7.0):
        src = f"t^{beta - 1}"
        e = parse(src)
        for alpha in (0.5, 1.5, 2.5):
            order = FractionalOrder(alpha)
            if beta <= order.n:
                continue
            for t in ts:
                exact = caputo_power_exact(beta, order, 0.0, Side.LEFT, float(t))
                direct = caputo_direct(e, order, 0.0, Side.LEFT, float(t))
                assert direct == pytest.approx(exact, rel=1e-8, abs=1e-10), (
                    beta,
                    alpha,
                    t,
                )


def test_direct_quadrature_right_side():
    order = FractionalOrder(1.5)
    e = parse("(2 - t)^5")
    for t in (0.0, 0.7, 1.9):
        exact = caputo_power_exact(6.0, order, 2.0, Side.RIGHT, t)
        direct = caputo_direct(e, order, 2.0, Side.RIGHT, t)
        assert direct == pytest.approx(exact, rel=1e-8, abs=1e-12)
    assert caputo_direct(e, order, 2.0, Side.RIGHT, 2.0) == 0.0


def test_sousa_first_node_is_zero():
    times = np.linspace(0.0, 1.0, 11)
    samples = GridFunction(times=times, values=times**6)
    out = sousa_scheme(samples, 1.5)
    assert out.values[0] == 0.0
    assert out.times.size == times.size - 1
    np.testing.assert_array_equal(out.times, times[:-1])


def test_sousa_kills_linear_functions():
    # second differences of a linear sequence vanish, so the output is all
    # zero -- exactly so on a dyadic grid where 3t - 1 has no rounding
    times = 0.25 * np.arange(41)
    samples = GridFunction(times=times, values=3.0 * times - 1.0)
    out = sousa_scheme(samples, 1.3)
    assert np.all(out.values == 0.0)


def test_sousa_converges_on_power_function():
    order = FractionalOrder(1.5)
    errors = []
    for steps in (100, 200):
        times = np.linspace(0.0, 1.0, steps + 1)
        samples = GridFunction(times=times, values=times**6)
        out = sousa_scheme(samples, 1.5)
        exact = np.array(
            [caputo_power_exact(7.0, order, 0.0, Side.LEFT, float(t)) for t in out.times]
        )
        errors.append(float(np.max(np.abs(out.values - exact))))
    assert errors[1] < errors[0]


def test_sousa_input_validation():
    times = np.linspace(0.0, 1.0, 11)
    samples = GridFunction(times=times, values=times**2)
    for bad_alpha in (1.0, 2.0, 0.5, 2.5):
        with pytest.raises(ValueError):
            sousa_scheme(samples, bad_alpha)

    ragged = GridFunction(
        times=np.array([0.0, 0.1, 0.25, 0.3]), values=np.zeros(4)
    )
    with pytest.raises(ValueError):
        sousa_scheme(ragged, 1.5)

    with pytest.raises(ValueError):
        sousa_scheme(GridFunction(times=np.array([0.0]), values=np.array([1.0])), 1.5)


def test_l2_metric_properties():
    times = np.linspace(0.0, 1.0, 9)
    rng = np.random.default_rng(77)
    x = GridFunction(times=times, values=rng.normal(size=9))
    y = GridFunction(times=times, values=rng.normal(size=9))
    z = GridFunction(times=times, values=rng.normal(size=9))

    assert l2_grid_error(x, x) == 0.0
    assert l2_grid_error(x, y) == pytest.approx(l2_grid_error(y, x), rel=1e-15)
    # triangle inequality
    assert l2_grid_error(x, z) <= l2_grid_error(x, y) + l2_grid_error(y, z) + 1e-12

    known = GridFunction(times=np.array([0.0, 1.0]), values=np.array([0.0, 0.0]))
    other = GridFunction(times=np.array([0.0, 1.0]), values=np.array([3.0, 4.0]))
    assert l2_grid_error(known, other) == pytest.approx(5.0, rel=1e-15)

    shifted = GridFunction(times=times + 0.5, values=x.values)
    with pytest.raises(ValueError):
        l2_grid_error(x, shifted)
    short = GridFunction(times=times[:-1], values=x.values[:-1])
    with pytest.raises(ValueError):
        l2_grid_error(x, short)
