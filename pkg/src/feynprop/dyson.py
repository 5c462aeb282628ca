"""Perturbation series for the propagator of exponential-class potentials.

The production path works on the unit cube: the n-th series term (relative
to the free-with-field prefactor) is

    (1/n!) (-i g (t-t0)/hbar)^n  sum_{atom tuples} prod w_k
        int_{[0,1]^n} exp{ -(i/2)(hbar/mass)(t-t0) Q(alpha, sigma) }
                      exp{ sum_j alpha_j . [sigma_j x + (1-sigma_j) x0
                           + field terms] } d sigma

with the bridge form Q = sum_{jk} (alpha_j . alpha_k)(sigma_j sigma_k -
min(sigma_j, sigma_k)) <= 0. The time-interval parameterization of the
same term exists for cross-validation only (`order_term_tau`).

Quadrature: tensor Gauss-Legendre below `switch_order`, scrambled Sobol
sampling at and above it, with the quadrature error estimated from the
spread of the independent scramblings. The integrand is continuous but
only piecewise smooth (the bridge form Q carries derivative kinks across
sigma diagonals), so the tensor rule converges at O(points^-2) for
n >= 2 rather than spectrally; the certified comparisons below either
share quadrature nodes across both sides or carry tolerances far above
this. Series terms are accumulated in ascending order with compensated
summation, so results are reproducible bit-for-bit for a fixed seed.

The coupling g multiplies a g-free measure throughout. Callers who fold a
coupling into the atom weights get correspondingly rescaled terms.

Planck constant and mass enter the series exactly where the closed forms
restore them: the coupling is scaled by 1/hbar and the bridge kernel by
hbar/mass. The field-dependent closed-form prefactors are defined in
natural units, so a nonzero field requires hbar = mass = 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import _quadrature as qn
from .errors import ConvergenceBudgetError, UnsupportedError
from .field import TestFunction
from .freeprop import SpacetimePair, free_kernel_with_field, t_transform_free
from .measure import ExponentialMeasure, TimeDependentMeasure, potential_eval

__all__ = [
    "QuadratureSpec",
    "PropagatorQuery",
    "SeriesResult",
    "bridge_quadratic",
    "order_term_sigma",
    "order_term_tau",
    "t_transform_product",
    "tail_bound",
    "propagator",
    "propagator_timedep",
    "schrodinger_residual",
    "propagate_gaussian_packet",
    "N_MAX",
]

N_MAX = 30  # factorial decay makes deeper orders irrelevant at double precision


@dataclass(frozen=True)
class QuadratureSpec:
    """Node budget: tensor Gauss for orders below switch_order, scrambled
    low-discrepancy sampling (rounded up to a power of two) above."""

    points: int = 32
    samples: int = 4096
    seed: int = 0
    switch_order: int = 5
    scramblings: int = 8

    def __post_init__(self):
        if self.points < 2:
            raise ValueError("tensor rule needs points >= 2")
        if self.samples < 1000:
            raise ValueError("low-discrepancy rule needs samples >= 1000")
        if self.scramblings < 2:
            raise ValueError("error estimation needs >= 2 scramblings")


@dataclass(frozen=True)
class PropagatorQuery:
    """One propagator evaluation: endpoints, coupling, field and measure."""

    pair: SpacetimePair
    g: complex
    theta: TestFunction
    measure: object  # ExponentialMeasure or TimeDependentMeasure
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "g", complex(self.g))
        if self.hbar <= 0 or self.mass <= 0:
            raise ValueError("hbar and mass must be positive")
        mdim = self.measure.dim
        if mdim != self.pair.dim or self.theta.dim != self.pair.dim:
            raise ValueError("measure, field and endpoint dimensions differ")


@dataclass(frozen=True)
class SeriesResult:
    """Truncated series value with its per-order terms and certificates.

    ``terms[n]`` includes the free-with-field prefactor, so
    value == sum(terms) up to rounding. ``tail_bound`` bounds the modulus
    of the discarded tail of the series factor (the prefactor-free sum);
    ``quad_error_estimate`` aggregates the scrambling-spread standard
    errors of the sampled orders, scaled by the prefactor.
    """

    value: complex
    terms: tuple
    order_used: int
    tail_bound: float
    quad_error_estimate: float


def bridge_quadratic(alphas, sigmas) -> float:
    """Q = sum_{jk} (alpha_j . alpha_k)(sigma_j sigma_k - min); always <= 0
    for real alphas (min - product is the Brownian-bridge covariance)."""
    alphas = np.atleast_2d(np.asarray(alphas, dtype=float))
    sigmas = np.asarray(sigmas, dtype=float)
    if alphas.shape[0] != sigmas.shape[0] or alphas.shape[0] < 1:
        raise ValueError("need equally many alphas and sigmas, at least one")
    if np.any(sigmas < 0.0) or np.any(sigmas > 1.0):
        raise ValueError("sigma values must lie in [0, 1]")
    gram = (alphas[:, None, :] * alphas[None, :, :]).sum(axis=2)
    return float(qn.bridge_q(gram, sigmas[None, :])[0])


def _atom_key(entry):
    w, alpha, _ = entry
    return (tuple(alpha), w.real, w.imag)


def _static_atoms(measure) -> list:
    """Atoms as (weight, alpha, profile-or-None) for either measure kind.

    Atoms are sorted canonically so the tuple-sum accumulation order, and
    with it the floating result, is invariant under relabeling.
    """
    if isinstance(measure, ExponentialMeasure):
        return sorted(((w, a, None) for w, a in measure.atoms), key=_atom_key)
    if isinstance(measure, TimeDependentMeasure):
        out = []
        for comp, profile in measure.components:
            out.extend(sorted(((w, a, profile) for w, a in comp.atoms),
                              key=_atom_key))
        return out
    raise UnsupportedError(f"unsupported measure type {type(measure).__name__}")


def _integrate_tuple(atoms, combo, nodes, wts, q: PropagatorQuery) -> complex:
    """Sigma integral for one atom multiset over the given node set."""
    alphas = np.array([atoms[i][1] for i in combo], dtype=float)
    profiles = [atoms[i][2] for i in combo]
    has_profiles = any(p is not None for p in profiles)
    n = alphas.shape[0]
    T = q.pair.duration
    lam = 0.5 * q.hbar / q.mass * T
    gram = (alphas[:, None, :] * alphas[None, :, :]).sum(axis=2)
    adx = (alphas * (q.pair.x - q.pair.x0)).sum(axis=1)
    base = float((alphas * q.pair.x0).sum())
    with_field = not q.theta.is_zero
    if with_field:
        a_full = (alphas * q.theta.integral(q.pair.t0, q.pair.t)).sum(axis=1)

    total = 0.0 + 0.0j
    m = nodes.shape[0]
    step = qn.chunk_rows(n)
    for lo in range(0, m, step):
        s = nodes[lo:lo + step]
        quad_form = qn.bridge_q(gram, s)
        expo_re = (s * adx).sum(axis=1) + base
        if with_field:
            s_abs = T * s + q.pair.t0
            upto = q.theta.integral_upto(q.pair.t0, s_abs)  # (mc, n, d)
            expo_re = expo_re + (s * a_full).sum(axis=1)
            expo_re = expo_re - (upto * alphas[None, :, :]).sum(axis=(1, 2))
        vals = np.exp(expo_re - 1j * lam * quad_form)
        if has_profiles:
            s_abs = T * s + q.pair.t0
            for j, prof in enumerate(profiles):
                if prof is not None:
                    vals = vals * prof(s_abs[:, j])
        total += complex((wts[lo:lo + step] * vals).sum())
    return total


def _tuple_sum(atoms, n, nodes, wts, q) -> complex:
    total = 0.0 + 0.0j
    for combo, count in qn.atom_multisets(len(atoms), n):
        wprod = 1.0 + 0.0j
        for i in combo:
            wprod *= atoms[i][0]
        if wprod == 0.0:
            continue
        total += count * wprod * _integrate_tuple(atoms, combo, nodes, wts, q)
    return total


def _order_term(n: int, q: PropagatorQuery, quad: QuadratureSpec):
    """n-th series-factor term and its quadrature standard error."""
    if n == 0:
        return 1.0 + 0.0j, 0.0
    atoms = _static_atoms(q.measure)
    T = q.pair.duration
    pref = (-1j * q.g * T / q.hbar) ** n / math.factorial(n)
    if n < quad.switch_order:
        nodes, wts = qn.tensor_nodes_unit(n, quad.points)
        return pref * _tuple_sum(atoms, n, nodes, wts, q), 0.0
    estimates = []
    for pts in qn.sobol_scramblings(n, quad.samples, quad.seed, quad.scramblings):
        wts = np.full(pts.shape[0], 1.0 / pts.shape[0])
        estimates.append(pref * _tuple_sum(atoms, n, pts, wts, q))
    estimates = np.array(estimates)
    mean = complex(estimates.mean())
    k = len(estimates)
    spread = math.sqrt(float((np.abs(estimates - mean) ** 2).sum()) / (k - 1))
    return mean, spread / math.sqrt(k)


def order_term_sigma(n: int, q: PropagatorQuery,
                     quad: QuadratureSpec | None = None) -> complex:
    """n-th summand of the series factor (free prefactor excluded)."""
    if n < 0:
        raise ValueError("order must be >= 0")
    if not isinstance(q.measure, (ExponentialMeasure, TimeDependentMeasure)):
        raise UnsupportedError("series terms require a finite atomic measure")
    value, _ = _order_term(n, q, quad or QuadratureSpec())
    return value


def t_transform_product(alphas, taus, theta: TestFunction, p: SpacetimePair) -> complex:
    """T-transform of the free integrand times prod_j exp(alpha_j . x(tau_j)).

    Closed form: the free T-transform with its argument shifted by
    i sum_j alpha_j 1_{(tau_j, t]}, times exp(sum_j alpha_j . x); the
    shifted square is expanded analytically (bilinear, not Hermitian).
    """
    alphas = np.atleast_2d(np.asarray(alphas, dtype=float))
    taus = np.asarray(taus, dtype=float)
    if alphas.shape[0] != taus.shape[0]:
        raise ValueError("need equally many alphas and taus")
    if alphas.shape[1] != p.dim:
        raise ValueError("alpha dimension differs from endpoints")
    if np.any(taus < p.t0) or np.any(taus > p.t):
        raise ValueError("tau values must lie in [t0, t]")
    if taus.shape[0] == 0:
        return t_transform_free(theta, p)

    T = p.duration
    gram = (alphas[:, None, :] * alphas[None, :, :]).sum(axis=2)
    # -(i/2) int (theta + i sum alpha 1)^2, expanded
    e1 = -0.5j * theta.l2_norm_sq()
    full = theta.integral(p.t0, p.t)
    tails = full[None, :] - theta.integral_upto(p.t0, taus)  # int_{tau_j}^t theta
    e1 += complex((alphas * tails).sum())
    tmax = np.maximum(taus[:, None], taus[None, :])
    e1 += 0.5j * complex((gram * (p.t - tmax)).sum())
    # quadratic endpoint term with the shifted source
    v = full.astype(complex)
    v = v + 1j * (alphas * (p.t - taus)[:, None]).sum(axis=0)
    v = v + (p.x - p.x0)
    e2 = 0.5j * complex((v * v).sum()) / T
    e3 = complex((alphas * p.x).sum())
    pref = cmath.exp(-1j * math.pi * p.dim / 4.0) * (2.0 * math.pi * T) ** (-p.dim / 2.0)
    return pref * cmath.exp(e1 + e2 + e3)


def order_term_tau(n: int, q: PropagatorQuery, points: int = 32) -> complex:
    """n-th full series term in the time-interval parameterization.

    Cross-validation path: integrates t_transform_product times the field
    correction over [t0, t]^n with tensor Gauss nodes. Must agree with
    free_kernel_with_field * order_term_sigma(n). Natural units only.
    """
    if q.hbar != 1.0 or q.mass != 1.0:
        raise UnsupportedError("time-interval parameterization assumes hbar = mass = 1")
    if not isinstance(q.measure, ExponentialMeasure):
        raise UnsupportedError("time-interval parameterization needs a static measure")
    if n == 0:
        return free_kernel_with_field(q.theta, q.pair)
    p = q.pair
    correction = cmath.exp(
        0.5j * q.theta.l2_norm_sq_complement(p.t0, p.t)
        + 1j * float(p.x0 @ q.theta.eval(p.t0))
        - 1j * float(p.x @ q.theta.eval(p.t))
    )
    nodes01, wts = qn.tensor_nodes_unit(n, points)
    taus = p.t0 + p.duration * nodes01
    atoms = q.measure.atoms
    total = 0.0 + 0.0j
    for combo, count in qn.atom_multisets(len(atoms), n):
        wprod = 1.0 + 0.0j
        for i in combo:
            wprod *= atoms[i][0]
        if wprod == 0.0:
            continue
        alphas = np.array([atoms[i][1] for i in combo], dtype=float)
        acc = 0.0 + 0.0j
        for row, wt in zip(taus, wts):
            acc += wt * t_transform_product(alphas, row, q.theta, p)
        total += count * wprod * acc
    pref = (-1j * q.g) ** n / math.factorial(n) * p.duration ** n
    return pref * correction * total


def _moment_coefficient(q: PropagatorQuery) -> float:
    p = q.pair
    dx = float(np.linalg.norm(p.x - p.x0))
    x0n = float(np.linalg.norm(p.x0))
    return dx + x0n + 2.0 * math.sqrt(p.duration) * q.theta.norm()


def _series_growth_constant(q: PropagatorQuery) -> float:
    """M such that the n-th series-factor term has modulus <= M^n / n!."""
    coef = _moment_coefficient(q)
    T = q.pair.duration
    g_over = abs(q.g) / q.hbar
    if isinstance(q.measure, ExponentialMeasure):
        total = sum(abs(w) * math.exp(coef * float(np.linalg.norm(a)))
                    for w, a in q.measure.atoms)
        return g_over * T * total
    total = 0.0
    for comp, profile in q.measure.components:
        moment = sum(abs(w) * math.exp(coef * float(np.linalg.norm(a)))
                     for w, a in comp.atoms)
        total += profile.sup_bound(q.pair.t0, q.pair.t) * T * moment
    return g_over * total


def _exp_remainder(m: float, n: int) -> float:
    """sum_{k > n} m^k / k!, summed forward to avoid cancellation."""
    if m == 0.0:
        return 0.0
    log_term = (n + 1) * math.log(m) - math.lgamma(n + 2)
    if log_term > 700.0:
        return math.inf
    term = math.exp(log_term)
    total = term
    k = n + 2
    while term > 1e-20 * total and k < n + 500:
        term *= m / k
        if term > 1e300:
            return math.inf
        total += term
        k += 1
    return total


def tail_bound(n: int, q: PropagatorQuery) -> float:
    """Analytic bound on the modulus of the series-factor tail past order n.

    Uses the moment bound M on the coupling-and-measure side and the field
    prefactor exp(|theta|_0^2 + |x-x0| |theta|_0 / sqrt(t-t0)).
    """
    if n < 0:
        raise ValueError("order must be >= 0")
    m = _series_growth_constant(q)
    p = q.pair
    theta_norm = q.theta.norm()
    dx = float(np.linalg.norm(p.x - p.x0))
    pref = math.exp(theta_norm ** 2 + dx * theta_norm / math.sqrt(p.duration))
    return pref * _exp_remainder(m, n)


def _run_series(q: PropagatorQuery, tol: float | None, quad: QuadratureSpec,
                order: int | None) -> SeriesResult:
    if order is not None:
        n_used = order
        budget_ok = True
    else:
        if tol is None or tol <= 0:
            raise ValueError("tol must be positive")
        n_used = None
        for n in range(N_MAX + 1):
            if tail_bound(n, q) <= tol:
                n_used = n
                break
        budget_ok = n_used is not None
        if n_used is None:
            n_used = N_MAX

    prefactor = free_kernel_with_field(q.theta, q.pair, q.hbar, q.mass)
    terms = []
    se_sum = 0.0
    for n in range(n_used + 1):
        term, se = _order_term(n, q, quad)
        terms.append(prefactor * term)
        se_sum += se
    result = SeriesResult(
        value=qn.kahan_sum(terms),
        terms=tuple(terms),
        order_used=n_used,
        tail_bound=tail_bound(n_used, q),
        quad_error_estimate=abs(prefactor) * se_sum,
    )
    if not budget_ok:
        raise ConvergenceBudgetError(
            f"tail bound {result.tail_bound:.3e} did not reach tol {tol:.3e} "
            f"by order {N_MAX}",
            partial=result,
        )
    return result


def propagator(q: PropagatorQuery, tol: float = 1e-8,
               quad: QuadratureSpec | None = None,
               order: int | None = None) -> SeriesResult:
    """Truncated propagator K = K0^(theta) * sum_n term_n.

    The truncation order is the smallest N whose analytic tail bound is
    <= tol (N <= 30; ConvergenceBudgetError carrying the partial result
    otherwise). Pass ``order`` to fix N explicitly instead.
    """
    if not isinstance(q.measure, ExponentialMeasure):
        raise UnsupportedError("propagator requires a static atomic measure; "
                               "use propagator_timedep for time profiles")
    return _run_series(q, tol, quad or QuadratureSpec(), order)


def propagator_timedep(q: PropagatorQuery, tol: float = 1e-8,
                       quad: QuadratureSpec | None = None,
                       order: int | None = None) -> SeriesResult:
    """Propagator for measures of the form sum_j dm_j(alpha) rho_j(tau) dtau.

    Each sigma node is additionally weighted by rho_j((t-t0) sigma + t0)
    and atom tuples are drawn across components; with all profiles constant
    at 1 this reduces exactly to the static propagator.
    """
    if not isinstance(q.measure, TimeDependentMeasure):
        raise UnsupportedError("propagator_timedep requires a TimeDependentMeasure")
    return _run_series(q, tol, quad or QuadratureSpec(), order)


def schrodinger_residual(q: PropagatorQuery, n: int, h: float, dt: float,
                         quad: QuadratureSpec | None = None) -> complex:
    """Centered-difference residual of the truncated series S_N:

        R_N = (i d/dt + (hbar/2 mass) Lap - (g/hbar) V(x)
               - x . thetadot(t)/hbar) S_N

    evaluated at (x, t). By the series recursion R_N must equal
    -(g/hbar) V(x) times the order-N summand, up to finite-difference and
    quadrature error.
    """
    if h <= 0 or dt <= 0:
        raise ValueError("step sizes must be positive")
    if not q.pair.t0 < q.pair.t - 2 * dt:
        raise ValueError("need t0 < t - 2 dt for the time stencil")
    quad = quad or QuadratureSpec()

    def s_at(x, t):
        pair = SpacetimePair(x, q.pair.x0, t, q.pair.t0)
        shifted = PropagatorQuery(pair, q.g, q.theta, q.measure, q.hbar, q.mass)
        if isinstance(q.measure, TimeDependentMeasure):
            return propagator_timedep(shifted, quad=quad, order=n).value
        return propagator(shifted, quad=quad, order=n).value

    x = q.pair.x
    t = q.pair.t
    center = s_at(x, t)
    dt_part = 1j * (s_at(x, t + dt) - s_at(x, t - dt)) / (2.0 * dt)
    lap = 0.0 + 0.0j
    for i in range(q.pair.dim):
        e = np.zeros(q.pair.dim)
        e[i] = h
        lap += (s_at(x + e, t) - 2.0 * center + s_at(x - e, t)) / h ** 2
    if isinstance(q.measure, TimeDependentMeasure):
        from .measure import potential_eval_timedep
        v = potential_eval_timedep(q.measure, x, t)
    else:
        v = potential_eval(q.measure, x)
    force = float(x @ q.theta.deriv(t))
    return (dt_part + 0.5 * q.hbar / q.mass * lap
            - (q.g / q.hbar) * v * center - force / q.hbar * center)


def _packet_combos(q: PropagatorQuery, n: int, quad: QuadratureSpec):
    """Flattened (coefficient, A, B) node data for one order, d = 1:
    the n-th term evaluated at (x, x0) is sum_i c_i exp(A_i x + B_i x0)."""
    T = q.pair.duration
    if n == 0:
        return np.ones(1, dtype=complex), np.zeros(1), np.zeros(1)
    atoms = _static_atoms(q.measure)
    pref = (-1j * q.g * T / q.hbar) ** n / math.factorial(n)
    lam = 0.5 * q.hbar / q.mass * T
    if n < quad.switch_order:
        node_sets = [(qn.tensor_nodes_unit(n, quad.points))]
    else:
        node_sets = []
        for pts in qn.sobol_scramblings(n, quad.samples, quad.seed, quad.scramblings):
            node_sets.append((pts, np.full(pts.shape[0], 1.0 / pts.shape[0])))
    share = 1.0 / len(node_sets)
    cs, avals, bvals = [], [], []
    for nodes, wts in node_sets:
        for combo, count in qn.atom_multisets(len(atoms), n):
            wprod = 1.0 + 0.0j
            for i in combo:
                wprod *= atoms[i][0]
            if wprod == 0.0:
                continue
            alphas = np.array([atoms[i][1][0] for i in combo], dtype=float)
            gram = alphas[:, None] * alphas[None, :]
            quad_form = qn.bridge_q(gram, nodes)
            coeff = (share * pref * count * wprod) * wts * np.exp(-1j * lam * quad_form)
            cs.append(coeff)
            avals.append((nodes * alphas).sum(axis=1))
            bvals.append(((1.0 - nodes) * alphas).sum(axis=1))
    return np.concatenate(cs), np.concatenate(avals), np.concatenate(bvals)


def propagate_gaussian_packet(q: PropagatorQuery, x_grid, sigma: float,
                              center: float = 0.0, order: int = 12,
                              quad: QuadratureSpec | None = None) -> np.ndarray:
    """Apply the truncated series propagator to a Gaussian packet, d = 1.

    psi0(u) = (2 pi sigma^2)^(-1/4) exp(-(u - center)^2 / (4 sigma^2));
    returns psi(x, t) = int K(x, t | u, t0) psi0(u) du on x_grid. The u
    integral of each quadrature-node exponential against psi0 and the free
    kernel is a Gaussian integral done in closed form, so the sigma
    quadrature is the only discretization. Requires theta = 0.
    """
    if q.pair.dim != 1:
        raise UnsupportedError("packet propagation is implemented for d = 1")
    if not q.theta.is_zero:
        raise UnsupportedError("packet propagation requires theta = 0")
    if sigma <= 0:
        raise ValueError("packet width must be positive")
    quad = quad or QuadratureSpec()
    x_grid = np.asarray(x_grid, dtype=float)
    T = q.pair.duration
    k2 = q.mass / (q.hbar * T)
    p_coef = 1.0 / (4.0 * sigma ** 2) - 0.5j * k2
    r_of_x = 0.5j * k2 * x_grid ** 2 - center ** 2 / (4.0 * sigma ** 2)
    norm0 = (2.0 * math.pi * sigma ** 2) ** (-0.25)
    kpref = cmath.exp(-1j * math.pi / 4.0) * (2.0 * math.pi * q.hbar * T / q.mass) ** -0.5

    psi = np.zeros_like(x_grid, dtype=complex)
    step = max(256, (1 << 21) // max(x_grid.shape[0], 1))
    for n in range(order + 1):
        cs, avals, bvals = _packet_combos(q, n, quad)
        for lo in range(0, cs.shape[0], step):
            c = cs[lo:lo + step, None]
            a = avals[lo:lo + step, None]
            b = bvals[lo:lo + step, None]
            qlin = b + center / (2.0 * sigma ** 2) - 1j * k2 * x_grid[None, :]
            expo = a * x_grid[None, :] + qlin ** 2 / (4.0 * p_coef) + r_of_x[None, :]
            psi += (c * np.exp(expo)).sum(axis=0)
    return kpref * norm0 * cmath.sqrt(math.pi / p_coef) * psi
