import math

import numpy as np
import pytest

from fracexpand.quadrature import (
    QuadratureConfig,
    QuadratureError,
    adaptive_integral,
    gauss_legendre_rule,
    kernel_power_integral,
)
from fracexpand.special import gamma


def test_adaptive_integral_basics():
    assert adaptive_integral(math.sin, 0.0, math.pi) == pytest.approx(2.0, rel=1e-12)
    assert adaptive_integral(lambda x: x**2, 0.0, 1.0) == pytest.approx(1.0 / 3.0)
    assert adaptive_integral(math.exp, 1.0, 1.0) == 0.0


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(abs_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=-1.0)
    with pytest.raises(ValueError):
        QuadratureConfig(max_subdivisions=0)


def test_adaptive_failure_is_reported():
    # far too few subdivisions for a rapidly oscillating integrand
    cfg = QuadratureConfig(abs_tol=1e-12, rel_tol=1e-12, max_subdivisions=1)
    with pytest.raises(QuadratureError):
        adaptive_integral(lambda x: math.sin(50.0 * x) * math.cos(73.0 * x), 0.0, 10.0, cfg)


def test_kernel_integral_beta_identity():
    # int_0^t (t-tau)^(q-1) tau^p dtau = Gamma(q) Gamma(p+1) / Gamma(p+q+1) t^(p+q)
    t = 0.8
    for q in (0.3, 0.5, 0.9):
        for p in (0.0, 1.0, 3.0):
            got = kernel_power_integral(lambda tau: tau**p, 0.0, t, q)
            expected = gamma(q) * gamma(p + 1.0) / gamma(p + q + 1.0) * t ** (p + q)
            assert got == pytest.approx(expected, rel=1e-10), (q, p)


def test_kernel_integral_regular_branch():
    # q >= 1 has no singularity; same beta identity applies
    t = 1.3
    for q in (1.0, 1.5, 2.0):
        got = kernel_power_integral(lambda tau: tau, 0.0, t, q)
        expected = gamma(q) * gamma(2.0) / gamma(q + 2.0) * t ** (q + 1.0)
        assert got == pytest.approx(expected, rel=1e-10), q


def test_kernel_integral_shifted_interval():
    # lower limit a != 0: int_a^t (t-tau)^(q-1) dtau = (t-a)^q / q
    got = kernel_power_integral(lambda tau: 1.0, 2.0, 5.0, 0.4)
    assert got == pytest.approx(3.0**0.4 / 0.4, rel=1e-11)


def test_kernel_integral_validation():
    assert kernel_power_integral(lambda tau: 1.0, 1.0, 1.0, 0.5) == 0.0
    with pytest.raises(ValueError):
        kernel_power_integral(lambda tau: 1.0, 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        kernel_power_integral(lambda tau: 1.0, 0.0, 1.0, -0.5)
    with pytest.raises(ValueError):
        kernel_power_integral(lambda tau: 1.0, 1.0, 0.0, 0.5)


def test_gauss_legendre_rule():
    nodes, weights = gauss_legendre_rule(5)
    assert nodes.shape == weights.shape == (5,)
    assert weights.sum() == pytest.approx(2.0, rel=1e-14)
    # a 5-point rule integrates polynomials through degree 9 exactly
    for deg in range(10):
        quad = float(np.dot(weights, nodes**deg))
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert quad == pytest.approx(exact, abs=1e-13), deg
    # cached: identical object back
    assert gauss_legendre_rule(5) is gauss_legendre_rule(5)
