import cmath
import math

import numpy as np
import pytest

from feynprop import (
    SpacetimePair,
    TestFunction,
    UnsupportedError,
    free_kernel,
    free_kernel_with_field,
    t_transform_free,
)


def test_free_kernel_branch_point():
    pair = SpacetimePair([0.0], [0.0], 1.0 / (2.0 * math.pi), 0.0)
    val = free_kernel(pair)
    assert val == pytest.approx(cmath.exp(-1j * math.pi / 4.0), rel=1e-14)
    assert abs(val) == pytest.approx(1.0, rel=1e-14)


def test_free_kernel_modulus():
    rng = np.random.default_rng(1)
    for _ in range(20):
        d = int(rng.integers(1, 4))
        pair = SpacetimePair(rng.normal(size=d), rng.normal(size=d),
                             rng.uniform(0.1, 3.0), 0.0)
        want = (2.0 * math.pi * pair.duration) ** (-d / 2.0)
        assert abs(free_kernel(pair)) == pytest.approx(want, rel=1e-13)


def test_free_kernel_explicit_value():
    pair = SpacetimePair([1.0], [0.0], 1.0, 0.0)
    want = (2.0 * math.pi) ** -0.5 * cmath.exp(-1j * math.pi / 4.0) * cmath.exp(0.5j)
    assert free_kernel(pair) == pytest.approx(want, rel=1e-14)


def test_time_order_enforced():
    with pytest.raises(ValueError):
        SpacetimePair([0.0], [0.0], 0.0, 0.0)
    with pytest.raises(ValueError):
        SpacetimePair([0.0], [0.0], -1.0, 0.0)


def test_branch_consistency_d2_product():
    pair2 = SpacetimePair([0.7, -0.4], [0.1, 0.2], 1.3, 0.2)
    k2 = free_kernel(pair2)
    k1a = free_kernel(SpacetimePair([0.7], [0.1], 1.3, 0.2))
    k1b = free_kernel(SpacetimePair([-0.4], [0.2], 1.3, 0.2))
    assert k2 == pytest.approx(k1a * k1b, rel=1e-14)


def test_t_transform_zero_field_is_free_kernel():
    pair = SpacetimePair([0.3], [0.1], 0.9, 0.0)
    assert t_transform_free(TestFunction(1), pair) == free_kernel(pair)
    scaled_zero = TestFunction(1, ((0, 0.0, 0.5, 0.2),))
    assert t_transform_free(scaled_zero, pair) == free_kernel(pair)


def test_t_transform_against_quadrature_oracle():
    # rebuild the closed form from Simpson evaluations of the theta integrals
    theta = TestFunction(1, ((0, 0.1, 0.5, 0.2),))
    pair = SpacetimePair([0.0], [0.0], 1.0, 0.0)
    val = t_transform_free(theta, pair)

    def bump(s):
        return 0.1 * np.exp(-((s - 0.5) ** 2) / (2 * 0.04))

    def simpson(f, a, b, panels):
        xs = np.linspace(a, b, 2 * panels + 1)
        w = np.ones_like(xs)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return float((w * f(xs)).sum()) * (b - a) / (2 * panels) / 3.0

    l2 = simpson(lambda s: bump(s) ** 2, -5.0, 6.0, 10 ** 6)
    i01 = simpson(bump, 0.0, 1.0, 10 ** 6)
    pref = cmath.exp(-1j * math.pi / 4.0) * (2.0 * math.pi) ** -0.5
    ref = pref * cmath.exp(-0.5j * l2 + 0.5j * i01 ** 2)
    assert val == pytest.approx(ref, rel=1e-12)


def test_field_kernel_zero_field():
    pair = SpacetimePair([0.4], [-0.2], 0.8, 0.1)
    assert free_kernel_with_field(TestFunction(1), pair) == free_kernel(pair)


def test_field_kernel_schrodinger_residual():
    # (i d_t + 1/2 Lap - x thetadot(t)) K = 0 up to FD error
    theta = TestFunction(1, ((0, 0.5, 0.4, 0.2),))
    x, t, x0, t0 = 0.3, 0.7, 0.0, 0.0
    h, dt = 1e-3, 1e-4

    def k(xx, tt):
        return free_kernel_with_field(theta, SpacetimePair([xx], [x0], tt, t0))

    center = k(x, t)
    dt_part = 1j * (k(x, t + dt) - k(x, t - dt)) / (2 * dt)
    lap = (k(x + h, t) - 2 * center + k(x - h, t)) / h ** 2
    force = x * theta.deriv(t)[0]
    resid = dt_part + 0.5 * lap - force * center
    assert abs(resid) <= 1e-4 * abs(center)


def test_field_kernel_residual_order_under_refinement():
    pair_args = (0.3, 0.7, 0.0, 0.0)
    theta = TestFunction(1)

    def resid(h, dt):
        x, t, x0, t0 = pair_args

        def k(xx, tt):
            return free_kernel(SpacetimePair([xx], [x0], tt, t0))

        center = k(x, t)
        val = (
            1j * (k(x, t + dt) - k(x, t - dt)) / (2 * dt)
            + 0.5 * (k(x + h, t) - 2 * center + k(x - h, t)) / h ** 2
        )
        return abs(val) / abs(center)

    coarse = resid(2e-3, 2e-4)
    fine = resid(1e-3, 1e-4)
    order = math.log2(coarse / fine)
    assert order >= 1.5


def test_initial_condition_recovered():
    # int K0^(theta)(x, t0+eps | x0) phi(x0) dx0 -> phi(x) for small eps
    theta = TestFunction(1, ((0, 0.2, 0.3, 0.5),))
    eps = 1e-4
    t0 = 0.0
    x = 0.3
    pair_t = t0 + eps

    # vectorized closed form over x0 (same formula as the scalar API)
    T = eps
    l2_full = theta.l2_norm_sq()
    l2_comp = theta.l2_norm_sq_complement(t0, pair_t)
    i_int = theta.integral(t0, pair_t)[0]
    th_t0 = theta.eval(t0)[0]
    th_t = theta.eval(pair_t)[0]
    pref = cmath.exp(-1j * math.pi / 4.0) * (2.0 * math.pi * T) ** -0.5

    def kernel_vec(x0):
        v = i_int + (x - x0)
        expo = -0.5j * l2_full + 0.5j * v * v / T
        corr = 0.5j * l2_comp + 1j * x0 * th_t0 - 1j * x * th_t
        return pref * np.exp(expo + corr)

    # cross-check the vectorization against the scalar API at a few points
    for x0 in (-0.4, 0.0, 0.9):
        scalar = free_kernel_with_field(
            theta, SpacetimePair([x], [x0], pair_t, t0)
        )
        assert kernel_vec(np.array([x0]))[0] == pytest.approx(scalar, rel=1e-12)

    def phi(u):
        return (2.0 * math.pi) ** -0.25 * np.exp(-(u ** 2) / 4.0)

    n = 2 ** 23 + 1
    u = np.linspace(x - 6.0, x + 6.0, n)
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    val = complex((w * kernel_vec(u) * phi(u)).sum()) * (u[1] - u[0]) / 3.0
    assert abs(val - phi(np.array([x]))[0]) < 1e-3


def test_field_with_nonunit_hbar_rejected():
    theta = TestFunction(1, ((0, 0.5, 0.4, 0.2),))
    pair = SpacetimePair([0.0], [0.0], 1.0, 0.0)
    with pytest.raises(UnsupportedError):
        t_transform_free(theta, pair, hbar=2.0)
    with pytest.raises(UnsupportedError):
        free_kernel_with_field(theta, pair, mass=3.0)
    # zero field: hbar and mass scale the free kernel
    k = free_kernel(pair, hbar=2.0, mass=0.5)
    assert abs(k) == pytest.approx((2.0 * math.pi * 4.0) ** -0.5, rel=1e-14)
