"""Closed forms for the Morse potential V(x) = g (e^{-2ax} - 2 gamma e^{-ax}):
the defining two-atom measure, the finite bound-state spectrum, normalized
eigenfunctions, the resolvent kernel in its Whittaker and regularized-1F1
representations, and the specialized two-branch series expansion.

The spectrum, eigenfunctions and resolvent are not analytic in the
coupling (they depend on omega = 2 sqrt(2g)/|a|); the propagator series
is entire in g. ``green_nonanalyticity_ratios`` emits the numeric shadow
of that contrast.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _quadrature as qn
from .errors import GreenFormError, UnsupportedError
from .measure import ExponentialMeasure
from .specfun import gamma as cgamma
from .specfun import kummer_m_regularized, laguerre, rgamma, whittaker_m, whittaker_w

__all__ = [
    "MorseParams",
    "GreenQuery",
    "MorseEigenfunction",
    "morse_measure",
    "morse_potential",
    "morse_spectrum",
    "morse_eigenfunction",
    "morse_green",
    "morse_series_term",
    "green_nonanalyticity_ratios",
]


@dataclass(frozen=True)
class MorseParams:
    """Morse parameters; g > 0 and gamma > 0 give the bound-state case,
    the series remains defined for any real g."""

    g: float
    gamma: float
    a: float

    def __post_init__(self):
        if self.a == 0.0:
            raise ValueError("Morse parameter a must be nonzero")

    @property
    def omega(self) -> float:
        if self.g <= 0:
            raise UnsupportedError("omega = 2 sqrt(2g)/|a| needs g > 0")
        return 2.0 * math.sqrt(2.0 * self.g) / abs(self.a)


@dataclass(frozen=True)
class GreenQuery:
    """Resolvent query at complex energy off the continuum [0, inf)."""

    params: MorseParams
    energy: complex

    def __post_init__(self):
        e = complex(self.energy)
        if e.imag == 0.0 and e.real >= 0.0:
            raise ValueError("energy must lie off the continuum [0, inf)")
        object.__setattr__(self, "energy", e)

    @property
    def nu(self) -> complex:
        # principal square root, cut along the negative real half line
        return 2.0 * cmath.sqrt(-2.0 * self.energy) / abs(self.params.a)


def morse_measure(p: MorseParams) -> ExponentialMeasure:
    """Two-atom measure {(1, -2a), (-2 gamma, -a)}; g stays external."""
    return ExponentialMeasure(
        1, ((1.0, (-2.0 * p.a,)), (-2.0 * p.gamma, (-p.a,)))
    )


def morse_potential(p: MorseParams, x):
    """g (e^{-2ax} - 2 gamma e^{-ax}), vectorized in x."""
    x = np.asarray(x, dtype=float)
    y = np.exp(-p.a * x)
    return p.g * (y * y - 2.0 * p.gamma * y)


def morse_spectrum(p: MorseParams) -> list:
    """Bound-state energies E_n = -(a^2/8)(gamma omega - 2n - 1)^2 for
    integers n >= 0 with gamma omega - 2n - 1 > 0, ascending."""
    if p.g <= 0:
        raise UnsupportedError("closed-form spectrum assumes the Morse case g > 0")
    if p.gamma <= 0:
        raise UnsupportedError("closed-form spectrum assumes gamma > 0")
    go = p.gamma * p.omega
    out = []
    n = 0
    while go - 2 * n - 1 > 0.0:
        out.append(-(p.a ** 2 / 8.0) * (go - 2 * n - 1) ** 2)
        n += 1
    return out


class MorseEigenfunction:
    """Normalized bound state Psi_n.

    Closed form sqrt(|a| beta n! / Gamma(gamma omega - n)) *
    y^(beta/2) e^(-y/2) L_n^(beta)(y) with y = omega e^{-ax} and
    beta = gamma omega - 2n - 1. The printed normalization constant is
    verified against an adaptive quadrature of the squared state at
    construction; if it were off by more than 1e-6 the state would be
    rescaled to unit norm, with the discrepancy kept in
    ``normalization_rescale``.
    """

    def __init__(self, n: int, params: MorseParams):
        spectrum = morse_spectrum(params)
        if not 0 <= n < len(spectrum):
            raise IndexError(
                f"bound state {n} out of range; spectrum has {len(spectrum)} levels"
            )
        self.n = n
        self.params = params
        self.energy = spectrum[n]
        self.omega = params.omega
        self.beta = params.gamma * self.omega - 2 * n - 1
        self.norm_const = math.sqrt(
            abs(params.a) * self.beta * math.factorial(n)
            / cgamma(params.gamma * self.omega - n).real
        )
        self.normalization_rescale = 1.0
        check = self._norm_sq_quadrature()
        self.closed_form_norm_sq = check
        if abs(check - 1.0) > 1e-6:
            self.normalization_rescale = 1.0 / math.sqrt(check)

    def _raw(self, x):
        y = self.omega * np.exp(-self.params.a * np.asarray(x, dtype=float))
        vals = self.norm_const * np.exp(
            0.5 * self.beta * np.log(y) - 0.5 * y
        ) * laguerre(self.n, self.beta, y)
        return vals

    def __call__(self, x):
        out = self._raw(x) * self.normalization_rescale
        return out if np.ndim(out) else float(out)

    def support_interval(self, y_max: float | None = None):
        """x range outside which Psi_n^2 is negligible."""
        if y_max is None:
            y_max = 80.0 + 2.0 * self.omega + 5.0 * self.beta
        y_min = math.exp(-80.0 / max(self.beta, 0.5))
        a = self.params.a
        lo = -math.log(y_max / self.omega) / a
        hi = -math.log(y_min / self.omega) / a
        return (min(lo, hi), max(lo, hi))

    def _norm_sq_quadrature(self) -> float:
        lo, hi = self.support_interval()
        panels = 4096
        prev = None
        for _ in range(6):
            xs = np.linspace(lo, hi, 2 * panels + 1)
            vals = self._raw(xs) ** 2
            h = (hi - lo) / (2 * panels)
            w = np.ones(xs.shape[0])
            w[1:-1:2] = 4.0
            w[2:-1:2] = 2.0
            total = float((w * vals).sum()) * h / 3.0
            if prev is not None and abs(total - prev) <= 1e-10 * max(abs(total), 1.0):
                return total
            prev = total
            panels *= 2
        return prev


@lru_cache(maxsize=64)
def _cached_eigenfunction(n: int, g: float, gam: float, a: float) -> MorseEigenfunction:
    return MorseEigenfunction(n, MorseParams(g, gam, a))


def morse_eigenfunction(n: int, x, p: MorseParams):
    """Psi_n(x); scalar or ndarray x."""
    return _cached_eigenfunction(n, p.g, p.gamma, p.a)(x)


def _heaviside(v: float) -> float:
    if v > 0.0:
        return 1.0
    return 0.5 if v == 0.0 else 0.0


def morse_green(xp: float, x: float, q: GreenQuery, form: str = "whittaker") -> complex:
    """Resolvent kernel G(x', x; E) in one of its two closed forms.

    "whittaker": the Gamma-prefactored product of Whittaker W and M.
    "kummer": the regularized-1F1 rewrite; raises GreenFormError within
    1e-8 of its singular integer nu values (removable in exact arithmetic,
    catastrophic numerically).

    Both forms carry the step-function split with Theta(0) = 1/2 and agree
    wherever both are defined.
    """
    p = q.params
    if p.g <= 0 or p.gamma <= 0:
        raise UnsupportedError("resolvent closed form assumes g > 0, gamma > 0")
    if form == "whittaker":
        return _green_whittaker(xp, x, q)
    if form == "kummer":
        return _green_kummer(xp, x, q)
    raise ValueError(f"unknown form {form!r}")


def _green_whittaker(xp: float, x: float, q: GreenQuery) -> complex:
    p = q.params
    a = p.a
    omega = p.omega
    nu = q.nu
    go = p.gamma * omega
    kap = 0.5 * go
    mu = 0.5 * nu
    z = omega * math.exp(-a * x)
    zp = omega * math.exp(-a * xp)
    pref = cgamma(0.5 * (1.0 + nu - go)) / (0.5 * omega * abs(a) * cgamma(nu + 1.0))
    pref *= math.exp(0.5 * a * (x + xp))
    th1 = _heaviside(a * (x - xp))
    th2 = _heaviside(a * (xp - x))
    total = 0.0 + 0.0j
    if th1:
        total += th1 * whittaker_w(kap, mu, zp) * whittaker_m(kap, mu, z)
    if th2:
        total += th2 * whittaker_m(kap, mu, zp) * whittaker_w(kap, mu, z)
    return pref * total


def _green_kummer(xp: float, x: float, q: GreenQuery) -> complex:
    p = q.params
    a = p.a
    omega = p.omega
    nu = q.nu
    go = p.gamma * omega
    if abs(nu - round(nu.real)) < 1e-8:
        raise GreenFormError(
            f"kummer form is singular at integer nu (nu = {nu})", form="kummer"
        )
    z = omega * math.exp(-a * x)
    zp = omega * math.exp(-a * xp)

    def f_plus(arg: float) -> complex:
        return kummer_m_regularized(0.5 * (1.0 + nu - go), 1.0 + nu, arg)

    def f_minus(arg: float) -> complex:
        return kummer_m_regularized(0.5 * (1.0 - nu - go), 1.0 - nu, arg)

    gfac = cgamma(0.5 * (1.0 + nu - go)) * rgamma(0.5 * (1.0 - nu - go))
    om_nu = cmath.exp(nu * math.log(omega))
    cross = -om_nu * cmath.exp(-0.5 * nu * a * (x + xp)) * gfac
    pref = (2.0 * math.pi / (abs(a) * cmath.sin(nu * math.pi))) * math.exp(
        -0.5 * omega * (math.exp(-a * xp) + math.exp(-a * x))
    )
    th1 = _heaviside(a * (x - xp))
    th2 = _heaviside(a * (xp - x))
    total = 0.0 + 0.0j
    if th1:
        total += th1 * f_plus(z) * (
            cross * f_plus(zp) + cmath.exp(0.5 * nu * a * (xp - x)) * f_minus(zp)
        )
    if th2:
        total += th2 * f_plus(zp) * (
            cross * f_plus(z) + cmath.exp(0.5 * nu * a * (x - xp)) * f_minus(z)
        )
    return pref * total


def _morse_params_from_measure(measure: ExponentialMeasure) -> tuple[float, float]:
    """Recover (gamma, a) from the two-atom Morse measure."""
    if measure.dim != 1 or len(measure.atoms) != 2:
        raise UnsupportedError("expected the two-atom Morse measure")
    atoms = sorted(measure.atoms, key=lambda wa: abs(wa[1][0]), reverse=True)
    (w2, a2), (w1, a1) = atoms  # |alpha| = 2|a| first
    a = -a1[0]
    if a == 0.0 or abs(a2[0] + 2.0 * a) > 1e-12 * max(1.0, abs(a)):
        raise UnsupportedError("atom exponents are not in Morse ratio (-2a, -a)")
    if abs(w2 - 1.0) > 1e-12 or w1.imag != 0.0:
        raise UnsupportedError("atom weights are not in Morse form (1, -2 gamma)")
    gam = -0.5 * w1.real
    return gam, a


def morse_series_term(n: int, q, quad=None) -> complex:
    """n-th series-factor term via the specialized branch expansion.

    Expands the two dm integrations into branch labels j in {1, 2}^n with
    weights (-2 gamma)^(2n - sum j), exponents -a sum j_l (sigma_l x +
    (1 - sigma_l) x0) and bridge form a^2 sum j_k j_l (...). Must equal
    order_term_sigma with the Morse measure. theta = 0 only, d = 1.
    """
    from .dyson import QuadratureSpec
    if n < 0:
        raise ValueError("order must be >= 0")
    if not q.theta.is_zero:
        raise UnsupportedError("specialized expansion assumes theta = 0")
    if n == 0:
        return 1.0 + 0.0j
    gam, a = _morse_params_from_measure(q.measure)
    quad = quad or QuadratureSpec()
    T = q.pair.duration
    lam = 0.5 * q.hbar / q.mass * T
    x = float(q.pair.x[0])
    x0 = float(q.pair.x0[0])
    pref = (-1j * q.g * T / q.hbar) ** n / math.factorial(n)

    if n < quad.switch_order:
        node_sets = [qn.tensor_nodes_unit(n, quad.points)]
    else:
        node_sets = [
            (pts, np.full(pts.shape[0], 1.0 / pts.shape[0]))
            for pts in qn.sobol_scramblings(n, quad.samples, quad.seed, quad.scramblings)
        ]

    branch_values = (1, 2)
    total_sets = []
    for nodes, wts in node_sets:
        total = 0.0 + 0.0j
        for combo, count in qn.atom_multisets(len(branch_values), n):
            jvec = np.array([branch_values[i] for i in combo], dtype=float)
            weight = (-2.0 * gam) ** (2 * n - int(jvec.sum()))
            gram = (a * a) * jvec[:, None] * jvec[None, :]
            acc = 0.0 + 0.0j
            step = qn.chunk_rows(n)
            for lo in range(0, nodes.shape[0], step):
                s = nodes[lo:lo + step]
                quad_form = qn.bridge_q(gram, s)
                expo = -a * ((s * jvec).sum(axis=1) * (x - x0) + jvec.sum() * x0)
                vals = np.exp(expo - 1j * lam * quad_form)
                acc += complex((wts[lo:lo + step] * vals).sum())
            total += count * weight * acc
        total_sets.append(total)
    return pref * (sum(total_sets) / len(total_sets))


def green_nonanalyticity_ratios(nu: complex, gam: float, omegas) -> np.ndarray:
    """|f(omega) - f(-omega)| / |f(omega)| for the resolvent factor
    f(omega) = Gamma((1 + nu - gamma omega)/2) omega^nu at fixed nu, gamma,
    along a sequence omega -> 0+.

    The ratio does not tend to 0: omega^nu jumps by the phase factor
    e^{i pi nu} across omega = 0. This is the numeric shadow of the
    resolvent's non-analyticity in the coupling, to be contrasted with the
    exact g^n scaling of the propagator's series terms.
    """
    out = []
    for om in np.asarray(omegas, dtype=float):
        if om <= 0:
            raise ValueError("omega samples must be positive")
        f_pos = cgamma(0.5 * (1.0 + nu - gam * om)) * cmath.exp(nu * math.log(om))
        f_neg = cgamma(0.5 * (1.0 + nu + gam * om)) * cmath.exp(
            nu * cmath.log(complex(-om))
        )
        out.append(abs(f_pos - f_neg) / abs(f_pos))
    return np.array(out)
