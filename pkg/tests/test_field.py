import math

import numpy as np
import pytest

from feynprop import TestFunction


def simpson(f, a, b, panels):
    xs = np.linspace(a, b, 2 * panels + 1)
    w = np.ones_like(xs)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float((w * f(xs)).sum()) * (b - a) / (2 * panels) / 3.0


def field_abs2(theta, s):
    # independent pointwise |theta|^2 straight from the bump parameters
    out = np.zeros((len(s), theta.dim))
    for b in theta.bumps:
        out[:, b.component] += b.c * np.exp(-((s - b.mu) ** 2) / (2.0 * b.w ** 2))
    return (out ** 2).sum(axis=1)


def test_zero_field():
    theta = TestFunction(2)
    assert np.all(theta.eval(0.3) == 0.0)
    assert np.all(theta.deriv(-1.0) == 0.0)
    assert np.all(theta.integral(-math.inf, math.inf) == 0.0)
    assert theta.l2_norm_sq() == 0.0
    assert theta.is_zero


def test_single_bump_peak():
    theta = TestFunction(1, ((0, 1.0, 0.0, 1.0),))
    assert theta.eval(0.0)[0] == pytest.approx(1.0)
    assert theta.deriv(0.0)[0] == pytest.approx(0.0, abs=1e-16)


def test_bump_value_and_derivative():
    theta = TestFunction(1, ((0, 2.0, 1.0, 0.5),))
    val = theta.eval(1.5)[0]
    assert val == pytest.approx(2.0 * math.exp(-0.5), rel=1e-14)
    assert val == pytest.approx(1.21306, abs=1e-5)
    der = theta.deriv(1.5)[0]
    assert der == pytest.approx(-(1.5 - 1.0) / 0.25 * val, rel=1e-14)
    assert der == pytest.approx(-2.42612, abs=1e-5)


def test_integral_full_line_and_half():
    c, mu, w = 0.8, 0.3, 1.7
    theta = TestFunction(1, ((0, c, mu, w),))
    full = theta.integral(-math.inf, math.inf)[0]
    assert full == pytest.approx(c * w * math.sqrt(2.0 * math.pi), rel=1e-14)
    half = theta.integral(-math.inf, mu)[0]
    assert half == pytest.approx(0.5 * full, rel=1e-14)


def test_integral_rejects_reversed_bounds():
    theta = TestFunction(1, ((0, 1.0, 0.0, 1.0),))
    with pytest.raises(ValueError):
        theta.integral(1.0, 0.0)


def test_l2_norm_single_bump():
    theta = TestFunction(1, ((0, 1.0, 0.0, 1.0),))
    assert theta.l2_norm_sq() == pytest.approx(math.sqrt(math.pi), rel=1e-14)


def test_l2_norm_far_bumps_add():
    theta = TestFunction(1, ((0, 1.3, 0.0, 0.7), (0, -0.4, 100.0, 0.9)))
    t1 = TestFunction(1, ((0, 1.3, 0.0, 0.7),))
    t2 = TestFunction(1, ((0, -0.4, 100.0, 0.9),))
    total = theta.l2_norm_sq()
    assert total == pytest.approx(t1.l2_norm_sq() + t2.l2_norm_sq(), rel=1e-12)
    # quadrature oracle around each bump
    quad = simpson(lambda s: field_abs2(theta, s), -10.0, 10.0, 4000) + simpson(
        lambda s: field_abs2(theta, s), 90.0, 110.0, 4000
    )
    assert total == pytest.approx(quad, rel=1e-10)


def test_l2_interval_against_quadrature():
    theta = TestFunction(1, ((0, 1.1, 0.2, 0.4), (0, -0.6, -0.5, 0.8)))
    got = theta.l2_norm_sq(-0.3, 1.2)
    ref = simpson(lambda s: field_abs2(theta, s), -0.3, 1.2, 20000)
    assert got == pytest.approx(ref, rel=1e-12)


def test_complement_identity():
    rng = np.random.default_rng(2)
    for _ in range(25):
        bumps = tuple(
            (0, rng.uniform(-3, 3), rng.uniform(-2, 2), rng.uniform(0.2, 2.0))
            for _ in range(rng.integers(1, 4))
        )
        theta = TestFunction(1, bumps)
        a, b = sorted(rng.uniform(-3, 3, size=2))
        full = theta.l2_norm_sq()
        if full == 0.0:
            continue
        inside = theta.l2_norm_sq(a, b)
        outside = theta.l2_norm_sq_complement(a, b)
        assert inside + outside == pytest.approx(full, rel=1e-12)


def test_integral_additivity():
    theta = TestFunction(1, ((0, 1.5, 0.1, 0.6),))
    a, b, c = -1.0, 0.4, 2.2
    lhs = theta.integral(a, b) + theta.integral(b, c)
    assert lhs[0] == pytest.approx(theta.integral(a, c)[0], rel=1e-14)


def test_deriv_matches_finite_differences():
    rng = np.random.default_rng(4)
    h = 1e-5
    for _ in range(60):
        theta = TestFunction(
            1, ((0, rng.uniform(-10, 10), rng.uniform(-5, 5), rng.uniform(0.1, 3.0)),)
        )
        s = rng.uniform(-10, 10)
        fd = (theta.eval(s + h)[0] - theta.eval(s - h)[0]) / (2 * h)
        assert abs(theta.deriv(s)[0] - fd) <= 1e-8


def test_multicomponent_fields():
    theta = TestFunction(2, ((0, 1.0, 0.0, 1.0), (1, 2.0, 0.5, 0.5)))
    v = theta.eval(0.5)
    assert v[0] == pytest.approx(math.exp(-0.125))
    assert v[1] == pytest.approx(2.0)
    with pytest.raises(ValueError):
        TestFunction(1, ((1, 1.0, 0.0, 1.0),))
    with pytest.raises(ValueError):
        TestFunction(1, ((0, 1.0, 0.0, -0.2),))
