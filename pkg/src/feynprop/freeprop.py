"""Closed forms for the free propagator, with and without an external
homogeneous force derived from a test function.

Branch convention: the prefactor (2 pi i T)^(-d/2) is fixed as
exp(-i pi d / 4) (2 pi T)^(-d/2) for T > 0, the usual physics choice that
makes |K0| the standard free-particle amplitude. All squares of complex
vectors are bilinear (v . v), not Hermitian; that is what makes the
shifted-argument identity behind the perturbation series hold.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedError
from .field import TestFunction

__all__ = [
    "SpacetimePair",
    "free_kernel",
    "t_transform_free",
    "free_kernel_with_field",
]


@dataclass(frozen=True)
class SpacetimePair:
    """Endpoints (x, t | x0, t0) of one propagator evaluation, t0 < t."""

    x: np.ndarray
    x0: np.ndarray
    t: float
    t0: float

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        x0 = np.atleast_1d(np.asarray(self.x0, dtype=float))
        if x.shape != x0.shape or x.ndim != 1:
            raise ValueError("x and x0 must be vectors of equal length")
        if not self.t0 < self.t:
            raise ValueError("require t0 < t")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "x0", x0)

    @property
    def dim(self) -> int:
        return self.x.shape[0]

    @property
    def duration(self) -> float:
        return self.t - self.t0


def _prefactor(dim: int, duration: float, hbar: float = 1.0, mass: float = 1.0) -> complex:
    # principal branch of (2 pi i hbar T / m)^(-d/2)
    scale = 2.0 * math.pi * hbar * duration / mass
    return cmath.exp(-1j * math.pi * dim / 4.0) * scale ** (-dim / 2.0)


def _bilinear_sq(v: np.ndarray) -> complex:
    return complex(np.sum(v * v))


def _require_natural_units(theta: TestFunction, hbar: float, mass: float):
    if (hbar != 1.0 or mass != 1.0) and not theta.is_zero:
        raise UnsupportedError(
            "field-dependent closed forms are defined in natural units; "
            "use hbar = mass = 1 or a zero field"
        )


def free_kernel(p: SpacetimePair, hbar: float = 1.0, mass: float = 1.0) -> complex:
    """Free propagator K0(x, t | x0, t0)."""
    if hbar <= 0 or mass <= 0:
        raise ValueError("hbar and mass must be positive")
    T = p.duration
    dx = p.x - p.x0
    phase = 1j * mass * float(dx @ dx) / (2.0 * hbar * T)
    return _prefactor(p.dim, T, hbar, mass) * cmath.exp(phase)


def t_transform_free(theta: TestFunction, p: SpacetimePair,
                     hbar: float = 1.0, mass: float = 1.0) -> complex:
    """T-transform of the free Feynman integrand at the field theta.

    Equals (2 pi i T)^(-d/2) exp[-(i/2)|theta|_0^2
    - (1/(2iT)) (int_{t0}^t theta + x - x0)^2] with the bilinear square.
    """
    _require_natural_units(theta, hbar, mass)
    if theta.is_zero:
        return free_kernel(p, hbar, mass)
    if theta.dim != p.dim:
        raise ValueError("field and endpoint dimensions differ")
    T = p.duration
    v = theta.integral(p.t0, p.t) + (p.x - p.x0)
    exponent = -0.5j * theta.l2_norm_sq() + 0.5j * _bilinear_sq(v) / T
    return _prefactor(p.dim, T) * cmath.exp(exponent)


def free_kernel_with_field(theta: TestFunction, p: SpacetimePair,
                           hbar: float = 1.0, mass: float = 1.0) -> complex:
    """Propagator for the potential x . thetadot(t): the T-transform times
    the complement-interval phase and the endpoint phases."""
    _require_natural_units(theta, hbar, mass)
    if theta.is_zero:
        return free_kernel(p, hbar, mass)
    correction = cmath.exp(
        0.5j * theta.l2_norm_sq_complement(p.t0, p.t)
        + 1j * float(p.x0 @ theta.eval(p.t0))
        - 1j * float(p.x @ theta.eval(p.t))
    )
    return t_transform_free(theta, p) * correction
