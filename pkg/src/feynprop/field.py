"""External field test functions: finite sums of Gaussian bumps per
component, standing in for the Schwartz class.

The family is closed under everything the propagator formulas need:
pointwise values, the analytic derivative (the physical force is x times
the time derivative of the field), exact antiderivatives through erf, and
closed-form L2 norms over intervals, their complements and the full line
(products of Gaussians are Gaussians).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .specfun import erf

__all__ = ["GaussianBump", "TestFunction", "ZERO_FIELD"]

_SQRT_HALF_PI = math.sqrt(0.5 * math.pi)


@dataclass(frozen=True)
class GaussianBump:
    component: int
    c: float
    mu: float
    w: float

    def __post_init__(self):
        if self.w <= 0:
            raise ValueError("bump width must be positive")
        if self.component < 0:
            raise ValueError("bump component must be >= 0")


def _bump_integral(c: float, mu: float, w: float, a: float, b: float):
    """Exact integral of c exp(-(s-mu)^2/(2 w^2)) over [a, b]; bounds may
    be +-inf and arrays are accepted."""
    za = (np.asarray(a, dtype=float) - mu) / (math.sqrt(2.0) * w)
    zb = (np.asarray(b, dtype=float) - mu) / (math.sqrt(2.0) * w)
    return c * w * _SQRT_HALF_PI * (erf(zb) - erf(za))


@dataclass(frozen=True)
class TestFunction:
    """d-component field theta(s), each component a sum of Gaussian bumps."""

    __test__ = False  # keep pytest from collecting the spec's type name

    dim: int
    bumps: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("field dimension must be >= 1")
        bumps = tuple(
            b if isinstance(b, GaussianBump) else GaussianBump(*b) for b in self.bumps
        )
        for b in bumps:
            if b.component >= self.dim:
                raise ValueError(
                    f"bump component {b.component} out of range for dim {self.dim}"
                )
        object.__setattr__(self, "bumps", bumps)

    @property
    def is_zero(self) -> bool:
        return all(b.c == 0.0 for b in self.bumps)

    def eval(self, s: float) -> np.ndarray:
        out = np.zeros(self.dim)
        for b in self.bumps:
            out[b.component] += b.c * math.exp(-0.5 * ((s - b.mu) / b.w) ** 2)
        return out

    def deriv(self, s: float) -> np.ndarray:
        out = np.zeros(self.dim)
        for b in self.bumps:
            val = b.c * math.exp(-0.5 * ((s - b.mu) / b.w) ** 2)
            out[b.component] += -(s - b.mu) / b.w ** 2 * val
        return out

    def integral(self, a: float, b: float) -> np.ndarray:
        """Componentwise integral over [a, b]; a <= b, infinities allowed."""
        if a > b:
            raise ValueError("integral requires a <= b")
        out = np.zeros(self.dim)
        for g in self.bumps:
            out[g.component] += _bump_integral(g.c, g.mu, g.w, a, b)
        return out

    def integral_upto(self, a: float, s) -> np.ndarray:
        """Integrals from a to each value in s; shape (len(s), dim)."""
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape + (self.dim,))
        for g in self.bumps:
            out[..., g.component] += _bump_integral(g.c, g.mu, g.w, a, s)
        return out

    def l2_norm_sq(self, a: float = -math.inf, b: float = math.inf) -> float:
        """Integral of |theta(s)|^2 over [a, b] in closed form."""
        if a > b:
            raise ValueError("l2_norm_sq requires a <= b")
        per_comp: dict[int, list[GaussianBump]] = {}
        for g in self.bumps:
            per_comp.setdefault(g.component, []).append(g)
        total = 0.0
        for group in per_comp.values():
            for j, gj in enumerate(group):
                for gk in group[j:]:
                    sym = 1.0 if gk is gj else 2.0
                    s2 = gj.w ** 2 + gk.w ** 2
                    wstar = gj.w * gk.w / math.sqrt(s2)
                    mustar = (gj.mu * gk.w ** 2 + gk.mu * gj.w ** 2) / s2
                    damp = math.exp(-((gj.mu - gk.mu) ** 2) / (2.0 * s2))
                    total += sym * gj.c * gk.c * damp * _bump_integral(
                        1.0, mustar, wstar, a, b
                    )
        return float(total)

    def l2_norm_sq_complement(self, a: float, b: float) -> float:
        """Integral of |theta|^2 over the complement of [a, b]."""
        return self.l2_norm_sq() - self.l2_norm_sq(a, b)

    def norm(self) -> float:
        """Full-line L2 norm |theta|_0."""
        return math.sqrt(max(self.l2_norm_sq(), 0.0))


ZERO_FIELD = TestFunction(dim=1)


def zero_field(dim: int) -> TestFunction:
    return TestFunction(dim=dim)
