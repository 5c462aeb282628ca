"""Imaginary-mass continuation of the series: divergent heat-equation
terms and the closed-form lower bound certifying the divergence.

Replacing mass by i*mass turns the oscillatory bridge phase into the real
exponent -(hbar/(2 mass))(t-t0) Q >= 0, so for positive one-dimensional
measures with support off the origin the term magnitudes eventually grow
like exp(const * n^2) and beat the 1/n! decay. Terms are accumulated in
log-magnitude form because exp(c n^2) leaves double range quickly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _quadrature as qn
from .errors import UnsupportedError
from .freeprop import SpacetimePair
from .measure import ExponentialMeasure

__all__ = [
    "HeatQuery",
    "heat_term",
    "heat_term_log10",
    "divergence_lower_bound",
    "divergence_lower_bound_log10",
    "divergence_growth_threshold",
    "default_a0",
]

_LOG10_E = math.log10(math.e)


@dataclass(frozen=True)
class HeatQuery:
    """Continuation query: real positive mass is stored, the substitution
    mass -> i*mass is applied internally. The divergence theorem needs a
    positive atomic measure in d = 1 with some support off the origin;
    pass validate=False to probe excluded cases (e.g. a single atom at 0).
    """

    pair: SpacetimePair
    g: complex
    measure: ExponentialMeasure
    hbar: float = 1.0
    mass: float = 1.0
    validate: bool = True

    def __post_init__(self):
        object.__setattr__(self, "g", complex(self.g))
        if self.hbar <= 0 or self.mass <= 0:
            raise ValueError("hbar and mass must be positive")
        if self.measure.dim != 1 or self.pair.dim != 1:
            raise ValueError("heat continuation is stated for d = 1")
        if self.validate:
            for w, alpha in self.measure.atoms:
                if w.imag != 0.0 or w.real <= 0.0:
                    raise ValueError("divergence theorem needs strictly positive weights")
            if not any(a[0] != 0.0 for _, a in self.measure.atoms):
                raise ValueError("measure must have support off the origin")

    def reflected(self) -> "HeatQuery":
        """x <-> -x pre-transform; moves negative-side support to [a0, inf)."""
        pair = SpacetimePair(-self.pair.x, -self.pair.x0, self.pair.t, self.pair.t0)
        measure = ExponentialMeasure(
            1, tuple((w, -a) for w, a in self.measure.atoms)
        )
        return HeatQuery(pair, self.g, measure, self.hbar, self.mass, self.validate)


def _log_integral(hq: HeatQuery, n: int, nodes: np.ndarray, wts: np.ndarray) -> float:
    """log of sum_tuples prod(w) int exp{-(hbar/2m) T Q + sum alpha (...)};
    the integrand is positive for positive measures."""
    T = hq.pair.duration
    lam = 0.5 * hq.hbar / hq.mass * T
    x = float(hq.pair.x[0])
    x0 = float(hq.pair.x0[0])
    atoms = hq.measure.atoms
    log_scale = -math.inf
    scaled = 0.0
    for combo, count in qn.atom_multisets(len(atoms), n):
        alphas = np.array([atoms[i][1][0] for i in combo], dtype=float)
        wprod = math.prod(abs(atoms[i][0]) for i in combo)
        gram = alphas[:, None] * alphas[None, :]
        step = qn.chunk_rows(n)
        for lo in range(0, nodes.shape[0], step):
            s = nodes[lo:lo + step]
            expo = -lam * qn.bridge_q(gram, s)
            expo += (s * alphas).sum(axis=1) * (x - x0) + alphas.sum() * x0
            top = float(expo.max())
            block = float((wts[lo:lo + step] * np.exp(expo - top)).sum())
            block_log = top + math.log(count * wprod)
            if block_log > log_scale:
                scaled = scaled * math.exp(log_scale - block_log) + block
                log_scale = block_log
            else:
                scaled += block * math.exp(block_log - log_scale)
    return log_scale + math.log(scaled)


def _term_log_parts(n: int, hq: HeatQuery, quad) -> tuple[float, float]:
    """(log10 |term_n|, relative standard error of the sigma integral)."""
    if n == 0:
        return 0.0, 0.0
    T = hq.pair.duration
    log_pref = n * math.log(abs(hq.g) * T / hq.hbar) - math.lgamma(n + 1)
    if n < quad.switch_order:
        nodes, wts = qn.tensor_nodes_unit(n, quad.points)
        return (log_pref + _log_integral(hq, n, nodes, wts)) * _LOG10_E, 0.0
    logs = []
    for pts in qn.sobol_scramblings(n, quad.samples, quad.seed, quad.scramblings):
        wts = np.full(pts.shape[0], 1.0 / pts.shape[0])
        logs.append(_log_integral(hq, n, pts, wts))
    logs = np.array(logs)
    top = float(logs.max())
    vals = np.exp(logs - top)
    mean = float(vals.mean())
    spread = float(vals.std(ddof=1)) / math.sqrt(len(vals))
    return (log_pref + top + math.log(mean)) * _LOG10_E, spread / mean


def heat_term_log10(n: int, hq: HeatQuery, quad=None) -> tuple[float, float]:
    """log10 |n-th heat-series term| and the relative standard error of
    its quadrature (0 for the tensor rule)."""
    if n < 0:
        raise ValueError("order must be >= 0")
    from .dyson import QuadratureSpec
    return _term_log_parts(n, hq, quad or QuadratureSpec())


def heat_term(n: int, hq: HeatQuery, quad=None) -> complex:
    """n-th term of the continued series; the phase is (-i g T/hbar)^n up
    to |g T/hbar|^n, the magnitude comes from the positive sigma integral.
    Overflows to complex infinity once the magnitude leaves double range.
    """
    if n == 0:
        return 1.0 + 0.0j
    log10_mag, _ = heat_term_log10(n, hq, quad)
    T = hq.pair.duration
    pref = -1j * hq.g * T / hq.hbar
    phase = (pref / abs(pref)) ** n if pref != 0 else 1.0
    if log10_mag > 307.0:
        raise OverflowError(
            f"|heat term| ~ 1e{log10_mag:.0f} exceeds double range; "
            "use heat_term_log10"
        )
    return phase * 10.0 ** log10_mag


def default_a0(hq: HeatQuery) -> tuple[HeatQuery, float]:
    """Default support cutoff: the smallest positive atom location, after
    the x <-> -x reflection when the support lies on the negative side."""
    pos = [a[0] for _, a in hq.measure.atoms if a[0] > 0.0]
    if pos:
        return hq, min(pos)
    neg = [a[0] for _, a in hq.measure.atoms if a[0] < 0.0]
    if not neg:
        raise ValueError("measure has no support off the origin")
    reflected = hq.reflected()
    return reflected, min(-a for a in neg)


def _bound_constants(hq: HeatQuery, a0: float) -> tuple[float, float]:
    if a0 <= 0:
        raise ValueError("a0 must be positive (reflect the query first)")
    x = abs(float(hq.pair.x[0]))
    x0 = abs(float(hq.pair.x0[0]))
    tail_mass = sum(
        w.real * math.exp(-abs(a[0]) * (x + x0))
        for w, a in hq.measure.atoms
        if a[0] >= a0
    )
    if tail_mass <= 0.0:
        raise ValueError(f"measure carries no mass on [{a0}, inf)")
    T = hq.pair.duration
    c_lin = abs(hq.g) * T / (16.0 * hq.hbar) * tail_mass
    c_quad = hq.hbar * T * a0 ** 2 / (32.0 * hq.mass)
    return c_lin, c_quad


def divergence_lower_bound(n: int, hq: HeatQuery, a0: float) -> float:
    """(1/n!) (|g| T I(a0) / (16 hbar))^n exp((hbar T a0^2/(32 mass)) n^2),
    a valid lower bound for |heat_term(n)| when the measure is positive
    with mass on [a0, inf)."""
    if n < 0:
        raise ValueError("order must be >= 0")
    return 10.0 ** divergence_lower_bound_log10(n, hq, a0)


def divergence_lower_bound_log10(n: int, hq: HeatQuery, a0: float) -> float:
    c_lin, c_quad = _bound_constants(hq, a0)
    if n == 0:
        return 0.0
    ln_val = -math.lgamma(n + 1) + n * math.log(c_lin) + c_quad * n * n
    return ln_val * _LOG10_E


def divergence_growth_threshold(hq: HeatQuery, a0: float, n_check: int = 10000) -> int:
    """Smallest n0 such that the lower bound is strictly increasing from n0
    on (log-ratio positive for every n >= n0), certifying divergence.

    The ratio log(b_{n+1}/b_n) = log c - log(n+1) + c_quad (2n+1) is
    eventually increasing in n because the linear term beats the log, so
    positivity at one point past the monotonicity onset persists.
    """
    c_lin, c_quad = _bound_constants(hq, a0)

    def log_ratio(n: int) -> float:
        return math.log(c_lin) - math.log(n + 1) + c_quad * (2 * n + 1)

    # ratio increasing once 1/(n+1) <= 2 c_quad
    mono_from = max(0, math.ceil(1.0 / (2.0 * c_quad)) - 1)
    n0 = mono_from
    while log_ratio(n0) <= 0.0:
        n0 += 1
        if n0 > n_check:
            raise RuntimeError("no growth threshold found below n_check")
    while n0 > 0 and log_ratio(n0 - 1) > 0.0:
        n0 -= 1
    return n0
