import cmath
import math

import mpmath
import numpy as np
import pytest

from feynprop.errors import PoleError, PrecisionLossError
from feynprop.specfun import (
    SpecfunConfig,
    erf,
    gamma,
    kummer_m_regularized,
    laguerre,
    log_gamma,
    rgamma,
    whittaker_m,
    whittaker_w,
)

mpmath.mp.dps = 30


def test_gamma_factorials():
    assert gamma(1.0) == pytest.approx(1.0, rel=1e-14)
    assert gamma(5.0) == pytest.approx(24.0, rel=1e-14)
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)


def test_gamma_reflection_identity():
    z = 0.3 + 0.7j
    lhs = gamma(z) * gamma(1.0 - z)
    rhs = math.pi / cmath.sin(math.pi * z)
    assert abs(lhs - rhs) / abs(rhs) < 1e-12


def test_gamma_random_sweep_vs_mpmath():
    rng = np.random.default_rng(8)
    for _ in range(200):
        z = complex(rng.uniform(-30, 90), rng.uniform(-40, 40))
        if abs(z) > 100 or abs(z - round(z.real)) < 1e-3:
            continue
        ours = gamma(z)
        ref = complex(mpmath.gamma(z))
        assert abs(ours - ref) / abs(ref) < 1e-13


def test_gamma_pole_error_with_residue_sign():
    with pytest.raises(PoleError) as info:
        gamma(0.0)
    assert info.value.residue_sign == 1
    with pytest.raises(PoleError) as info:
        gamma(-3.0)
    assert info.value.location == -3
    assert info.value.residue_sign == -1
    assert rgamma(-3.0) == 0.0


def test_log_gamma_real_and_complex():
    assert log_gamma(7.3).real == pytest.approx(math.lgamma(7.3), rel=1e-14)
    z = 4.0 + 2.5j
    assert abs(cmath.exp(log_gamma(z)) - gamma(z)) / abs(gamma(z)) < 1e-12


def test_kummer_at_zero_and_identity():
    b = 2.3 - 0.4j
    assert abs(kummer_m_regularized(1.7, b, 0.0) - 1.0 / gamma(b)) < 1e-15
    # 1F1(1;2;z) = (e^z - 1)/z
    z = 0.7
    want = (math.exp(z) - 1.0) / z / gamma(2.0).real
    assert kummer_m_regularized(1.0, 2.0, z).real == pytest.approx(want, rel=1e-13)


def test_kummer_b_to_zero_continuity():
    vp = kummer_m_regularized(0.7, 1e-7, 2.0)
    vm = kummer_m_regularized(0.7, -1e-7, 2.0)
    assert abs(vp - vm) / abs(vp) < 1e-6


def test_kummer_exact_nonpositive_integer_b():
    ours = kummer_m_regularized(1.2, -2.0, 1.5)
    eps = mpmath.mpf(10) ** -20
    ref = complex(mpmath.hyp1f1(1.2, -2 + eps, 1.5) / mpmath.gamma(-2 + eps))
    assert abs(ours - ref) / abs(ref) < 1e-13


def test_kummer_polynomial_case():
    # a = -n terminates; compare with explicit Laguerre relation:
    # 1F1(-n; b; z) = n! / (b)_n * L_n^(b-1)(z)
    n, b, z = 3, 2.5, 4.0
    poch = b * (b + 1) * (b + 2)
    want = math.factorial(n) / poch * laguerre(n, b - 1.0, z) / gamma(b).real
    assert kummer_m_regularized(-n, b, z).real == pytest.approx(want, rel=1e-12)


def test_kummer_sweep_vs_mpmath():
    rng = np.random.default_rng(17)
    checked = 0
    while checked < 120:
        a = complex(rng.uniform(-20, 20), rng.uniform(-5, 5))
        b = complex(rng.uniform(-10, 25), rng.uniform(-5, 5))
        z = complex(rng.uniform(0.0, 50.0), rng.uniform(-8, 8))
        if b.imag == 0 and abs(b - round(b.real)) < 1e-6 and b.real <= 0:
            continue
        try:
            ours = kummer_m_regularized(a, b, z)
        except PrecisionLossError:
            continue
        ref = complex(mpmath.hyp1f1(a, b, z) / mpmath.gamma(b))
        assert abs(ours - ref) <= 1e-11 * max(abs(ref), 1e-300)
        checked += 1


def test_kummer_negative_real_axis_uses_transform():
    ours = kummer_m_regularized(4.0, 7.0, -12.0)
    ref = complex(mpmath.hyp1f1(4.0, 7.0, -12.0) / mpmath.gamma(7.0))
    assert abs(ours - ref) / abs(ref) < 1e-12


def test_kummer_term_budget():
    with pytest.raises(PrecisionLossError):
        kummer_m_regularized(1.0, 2.0, 400.0, SpecfunConfig(max_terms=20))


def test_whittaker_m_small_z_power():
    kap, mu = 0.3, 0.4
    z = 1e-6
    ratio = whittaker_m(kap, mu, z) / z ** (mu + 0.5)
    assert ratio.real == pytest.approx(1.0, rel=1e-5)
    assert abs(ratio.imag) < 1e-12


def test_whittaker_wronskian():
    # M W' - M' W = -Gamma(2 mu + 1) / Gamma(mu - kappa + 1/2)
    h = 1e-5
    for kap, mu, z in ((0.3, 0.4, 1.5), (1.2, 0.65, 3.0), (-0.5, 0.26, 2.4)):
        m0 = whittaker_m(kap, mu, z)
        w0 = whittaker_w(kap, mu, z)
        mp_ = (whittaker_m(kap, mu, z + h) - whittaker_m(kap, mu, z - h)) / (2 * h)
        wp_ = (whittaker_w(kap, mu, z + h) - whittaker_w(kap, mu, z - h)) / (2 * h)
        got = m0 * wp_ - mp_ * w0
        want = -gamma(2 * mu + 1.0) / gamma(mu - kap + 0.5)
        assert abs(got - want) / abs(want) < 1e-8


def test_whittaker_w_large_z_asymptote():
    kap, mu, z = 0.3, 0.4, 40.0
    lead = math.exp(-z / 2.0) * z ** kap
    assert abs(whittaker_w(kap, mu, z) / lead - 1.0) < 0.05


def test_whittaker_vs_mpmath_sweep():
    rng = np.random.default_rng(23)
    for _ in range(40):
        kap = rng.uniform(-2, 3)
        mu = rng.uniform(0.05, 2.0)
        z = rng.uniform(0.2, 10.0)
        if abs(2 * mu - round(2 * mu)) < 1e-3:
            continue
        m_ref = complex(mpmath.whitm(kap, mu, z))
        w_ref = complex(mpmath.whitw(kap, mu, z))
        assert abs(whittaker_m(kap, mu, z) - m_ref) / abs(m_ref) < 1e-11
        assert abs(whittaker_w(kap, mu, z) - w_ref) / abs(w_ref) < 1e-8


def test_whittaker_w_crossover_band():
    # between the series and asymptotic sweet spots a few digits degrade;
    # the adaptive path keeps at least ~5 good digits there
    rng = np.random.default_rng(29)
    for _ in range(25):
        kap = rng.uniform(-2, 3)
        mu = rng.uniform(0.05, 2.0)
        z = rng.uniform(10.0, 30.0)
        if abs(2 * mu - round(2 * mu)) < 1e-3:
            continue
        w_ref = complex(mpmath.whitw(kap, mu, z))
        assert abs(whittaker_w(kap, mu, z) - w_ref) / abs(w_ref) < 1e-5


def test_whittaker_w_near_integer_two_mu():
    # Richardson limit path; mpmath handles the half-integer directly
    for kap, mu, z in ((2.0, 1.5, 4.0), (0.7, 1.0, 2.0), (0.9, 0.5 + 1e-9, 3.0)):
        ref = complex(mpmath.whitw(kap, mu, z))
        assert abs(whittaker_w(kap, mu, z) - ref) / abs(ref) < 1e-8


def test_whittaker_rejects_cut():
    with pytest.raises(ValueError):
        whittaker_m(0.3, 0.4, -1.0)
    with pytest.raises(ValueError):
        whittaker_w(0.3, 0.4, -2.0)


def test_laguerre_base_cases():
    assert laguerre(0, 1.7, 0.3) == 1.0
    assert laguerre(1, 2.0, 0.5) == pytest.approx(2.5)


def test_laguerre_orthogonality():
    # int_0^inf y^beta e^-y L_2 L_3 dy = 0, Gauss-Legendre on [0, 60]
    beta = 1.5
    x, w = np.polynomial.legendre.leggauss(400)
    y = 30.0 * (x + 1.0)
    wy = 30.0 * w
    val = float(
        (wy * y ** beta * np.exp(-y) * laguerre(2, beta, y) * laguerre(3, beta, y)).sum()
    )
    norm = float((wy * y ** beta * np.exp(-y) * laguerre(2, beta, y) ** 2).sum())
    assert abs(val) / norm < 1e-8


def test_laguerre_vs_mpmath():
    rng = np.random.default_rng(31)
    for _ in range(30):
        n = int(rng.integers(0, 9))
        beta = rng.uniform(-0.5, 4.0)
        y = rng.uniform(0.0, 20.0)
        ref = float(mpmath.laguerre(n, beta, y))
        assert laguerre(n, beta, y) == pytest.approx(ref, rel=1e-11, abs=1e-11)


def test_erf_basics():
    assert erf(0.0) == 0.0
    for x in (0.3, 1.0, 2.5):
        assert erf(-x) == -erf(x)
    # high-precision series oracle
    assert erf(1.0) == pytest.approx(float(mpmath.erf(1)), abs=1e-14)
    assert erf(1.0) == pytest.approx(0.8427007929, abs=1e-10)
    arr = erf(np.array([0.0, 1.0]))
    assert arr.shape == (2,)
