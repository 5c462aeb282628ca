import math

import numpy as np
import pytest

from feynprop import (
    ExponentialMeasure,
    HeatQuery,
    PropagatorQuery,
    QuadratureSpec,
    SpacetimePair,
    TestFunction,
    default_a0,
    divergence_growth_threshold,
    divergence_lower_bound,
    divergence_lower_bound_log10,
    heat_term,
    heat_term_log10,
    order_term_sigma,
    tail_bound,
)
from feynprop import oracle


def benchmark_query(x=0.0, x0=0.0, g=1.0, t=1.0):
    measure = ExponentialMeasure(1, ((1.0, (1.0,)),))
    pair = SpacetimePair([x], [x0], t, 0.0)
    return HeatQuery(pair, g, measure)


def test_heat_term_zero_order():
    assert heat_term(0, benchmark_query()) == 1.0


def test_heat_query_validation():
    measure_neg = ExponentialMeasure(1, ((-1.0, (1.0,)),))
    pair = SpacetimePair([0.0], [0.0], 1.0, 0.0)
    with pytest.raises(ValueError):
        HeatQuery(pair, 1.0, measure_neg)
    origin_only = ExponentialMeasure(1, ((1.0, (0.0,)),))
    with pytest.raises(ValueError):
        HeatQuery(pair, 1.0, origin_only)
    # check can be disabled for probing the excluded case
    hq = HeatQuery(pair, 1.0, origin_only, validate=False)
    for n in range(4):
        want = (-1j * 1.0 * 1.0) ** n / math.factorial(n)
        assert heat_term(n, hq) == pytest.approx(want, rel=1e-12)


def test_heat_first_order_simpson():
    hq = benchmark_query()
    got = heat_term(1, hq)

    def f(s):
        sig = s[:, 0]
        return np.exp(0.5 * (sig - sig ** 2))

    ref = -1j * oracle.brute_quad(f, 1, 10 ** 6)
    assert got == pytest.approx(ref, rel=1e-12)


def test_lower_bound_closed_form():
    hq = benchmark_query()
    for n in (0, 1, 3, 6):
        want = (1.0 / math.factorial(n)) * (1.0 / 16.0) ** n * math.exp(n * n / 32.0)
        assert divergence_lower_bound(n, hq, 1.0) == pytest.approx(want, rel=1e-12)


def test_terms_dominate_lower_bound():
    hq = benchmark_query()
    quad = QuadratureSpec(samples=2 ** 16)
    for n in range(1, 7):
        term_log, rel_se = heat_term_log10(n, hq, quad)
        guard = math.log10(max(1.0 - 3.0 * rel_se, 1e-6))
        assert term_log + guard >= divergence_lower_bound_log10(n, hq, 1.0)


def test_lower_bound_diverges():
    hq = benchmark_query()
    n0 = divergence_growth_threshold(hq, 1.0)
    logs = [divergence_lower_bound_log10(n, hq, 1.0) for n in range(n0, n0 + 50)]
    assert all(b > a for a, b in zip(logs, logs[1:]))
    # log-ratio stays positive up to n = 1e4
    c_lin = (1.0 / 16.0) * math.exp(-0.0)
    for n in range(n0, 10 ** 4):
        ratio = math.log(c_lin) - math.log(n + 1) + (1.0 / 32.0) * (2 * n + 1)
        assert ratio > 0.0
    # and the bound itself blows past any scale
    assert divergence_lower_bound_log10(10 ** 4, hq, 1.0) > 300


def test_growth_threshold_is_sharp():
    hq = benchmark_query()
    n0 = divergence_growth_threshold(hq, 1.0)
    assert n0 > 0
    c_lin = 1.0 / 16.0

    def log_ratio(n):
        return math.log(c_lin) - math.log(n + 1) + (2 * n + 1) / 32.0

    assert log_ratio(n0) > 0.0
    assert log_ratio(n0 - 1) <= 0.0


def test_default_a0_and_reflection():
    hq = benchmark_query()
    same, a0 = default_a0(hq)
    assert a0 == 1.0
    assert same.measure.atoms == hq.measure.atoms
    # negative-side support: reflect
    m_neg = ExponentialMeasure(1, ((2.0, (-0.5,)), (1.0, (-1.5,))))
    pair = SpacetimePair([0.3], [-0.1], 1.0, 0.0)
    hq_neg = HeatQuery(pair, 1.0, m_neg)
    refl, a0 = default_a0(hq_neg)
    assert a0 == 0.5
    assert all(a[0] > 0 for _, a in refl.measure.atoms)
    # reflection preserves the term values (x -> -x, alpha -> -alpha)
    for n in (1, 2, 3):
        direct, _ = heat_term_log10(n, hq_neg)
        mirrored, _ = heat_term_log10(n, refl)
        assert direct == pytest.approx(mirrored, rel=1e-13)
    # and the bound still sits below the terms
    for n in (1, 2, 3):
        term_log, _ = heat_term_log10(n, refl)
        assert term_log >= divergence_lower_bound_log10(n, refl, a0)


def test_lower_bound_needs_tail_mass():
    hq = benchmark_query()
    with pytest.raises(ValueError):
        divergence_lower_bound(1, hq, 5.0)  # no atoms at or beyond 5
    with pytest.raises(ValueError):
        divergence_lower_bound(1, hq, -1.0)


def test_schrodinger_side_stays_factorially_small():
    # the same integrals without the continuation obey |term| <= M^n/n!
    measure = ExponentialMeasure(1, ((1.0, (1.0,)),))
    pair = SpacetimePair([0.3], [-0.1], 1.0, 0.0)
    q = PropagatorQuery(pair, 1.0, TestFunction(1), measure)
    m_const = abs(q.g) * pair.duration * math.exp(
        (abs(0.3 - (-0.1)) + abs(-0.1)) * 1.0
    )
    quad = QuadratureSpec(points=16, samples=2048, scramblings=2)
    for n in range(1, 8):
        assert abs(order_term_sigma(n, q, quad)) <= m_const ** n / math.factorial(n)
        assert abs(order_term_sigma(n, q, quad)) <= tail_bound(n - 1, q)


def test_heat_overflow_raises():
    hq = benchmark_query(g=3.0, t=4.0)
    with pytest.raises(OverflowError):
        # n^2 growth exits double range long before n = 200
        heat_term(200, hq, QuadratureSpec(samples=1024, scramblings=2))


def test_heat_term_log10_large_order_growth():
    # log-domain sampling keeps working where the terms themselves have
    # left double range; the bound must stay below, and the n^2 exponent
    # eventually beats the factorial
    hq = benchmark_query()
    quad = QuadratureSpec(samples=1024, scramblings=2)
    l30, _ = heat_term_log10(30, hq, quad)
    l100, _ = heat_term_log10(100, hq, quad)
    assert l30 >= divergence_lower_bound_log10(30, hq, 1.0)
    assert l100 >= divergence_lower_bound_log10(100, hq, 1.0)
    assert l100 > l30 + 20.0  # superexponential growth regime
