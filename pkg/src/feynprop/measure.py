"""Finite atomic complex measures defining exponential-class potentials
V(x) = sum_k w_k exp(alpha_k . x), plus the time-dependent variant built
from continuous time profiles.

All exponential moments of a finite atomic measure are finite, so every
measure representable here automatically satisfies the admissibility
condition of the potential class. Continuous alpha-densities must be
pre-discretized by the caller; they are out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ExponentialMeasure",
    "TimeProfile",
    "TimeDependentMeasure",
    "potential_eval",
    "exponential_moment",
    "weighted_moment",
    "potential_eval_timedep",
]


@dataclass(frozen=True)
class ExponentialMeasure:
    """Finite atomic complex measure on R^d.

    atoms: sequence of (weight, alpha) with complex weight and alpha a
    length-dim array of real exponents.
    """

    dim: int
    atoms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("measure dimension must be >= 1")
        norm = []
        for w, alpha in self.atoms:
            alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
            if alpha.shape != (self.dim,):
                raise ValueError(
                    f"atom exponent has length {alpha.shape[0]}, expected {self.dim}"
                )
            norm.append((complex(w), alpha))
        object.__setattr__(self, "atoms", tuple(norm))

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.atoms], dtype=complex)

    @property
    def alphas(self) -> np.ndarray:
        if not self.atoms:
            return np.zeros((0, self.dim))
        return np.array([a for _, a in self.atoms], dtype=float)

    def total_variation(self) -> float:
        return float(sum(abs(w) for w, _ in self.atoms))


@dataclass(frozen=True)
class TimeProfile:
    """Continuous scalar weight rho(tau) applied to a measure component.

    kind is one of "constant", "polynomial" (coeffs c0..cN, N <= 4),
    "gaussian-bump" (amplitude, center, width) or "cosine" (amplitude,
    angular_frequency, phase).
    """

    kind: str
    params: tuple = ()

    def __post_init__(self):
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "params", params)
        if self.kind == "constant":
            if len(params) != 1:
                raise ValueError("constant profile takes a single value")
        elif self.kind == "polynomial":
            if not 1 <= len(params) <= 5:
                raise ValueError("polynomial profile supports degree <= 4")
        elif self.kind == "gaussian-bump":
            if len(params) != 3:
                raise ValueError("gaussian-bump profile takes (amplitude, center, width)")
            if params[2] <= 0:
                raise ValueError("gaussian-bump width must be positive")
        elif self.kind == "cosine":
            if len(params) != 3:
                raise ValueError("cosine profile takes (amplitude, angular_frequency, phase)")
        else:
            raise ValueError(f"unknown profile kind {self.kind!r}")

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.kind == "constant":
            out = np.full_like(tau, self.params[0])
        elif self.kind == "polynomial":
            out = np.polynomial.polynomial.polyval(tau, np.array(self.params))
        elif self.kind == "gaussian-bump":
            amp, center, width = self.params
            out = amp * np.exp(-0.5 * ((tau - center) / width) ** 2)
        else:
            amp, freq, phase = self.params
            out = amp * np.cos(freq * tau + phase)
        return out if out.ndim else float(out)

    def sup_bound(self, a: float, b: float) -> float:
        """Cheap valid upper bound for sup |rho| on [a, b]."""
        if self.kind == "constant":
            return abs(self.params[0])
        if self.kind in ("gaussian-bump", "cosine"):
            return abs(self.params[0])
        m = max(abs(a), abs(b))
        return float(sum(abs(c) * m ** i for i, c in enumerate(self.params)))


@dataclass(frozen=True)
class TimeDependentMeasure:
    """Sum of components dm_j(alpha) rho_j(tau) dtau with shared dimension."""

    components: tuple  # of (ExponentialMeasure, TimeProfile)

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("time-dependent measure needs at least one component")
        dims = {m.dim for m, _ in comps}
        if len(dims) != 1:
            raise ValueError("all components must share the same dimension")
        object.__setattr__(self, "components", comps)

    @property
    def dim(self) -> int:
        return self.components[0][0].dim


def potential_eval(m: ExponentialMeasure, x) -> complex:
    """V(x) = sum_k w_k exp(alpha_k . x)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (m.dim,):
        raise ValueError(f"position has length {x.shape[0]}, expected {m.dim}")
    total = 0.0 + 0.0j
    for w, alpha in m.atoms:
        total += w * math.exp(float(alpha @ x))
    return total


def exponential_moment(m: ExponentialMeasure, c: float) -> float:
    """Integral of exp(c |alpha|) against |m|; finite for every c >= 0."""
    if c < 0:
        raise ValueError("exponential moment requires c >= 0")
    return weighted_moment(m, 0.0, c)


def weighted_moment(m: ExponentialMeasure, c0: float, c1: float) -> float:
    """sum_k |w_k| exp(c1 |alpha_k|); c0 is left to the caller's prefactor."""
    if c1 < 0:
        raise ValueError("weighted moment requires c1 >= 0")
    total = 0.0
    for w, alpha in m.atoms:
        total += abs(w) * math.exp(c1 * float(np.linalg.norm(alpha)))
    return total


def potential_eval_timedep(tm: TimeDependentMeasure, x, tau: float) -> complex:
    """V(x, tau) = sum_j V_j(x) rho_j(tau)."""
    total = 0.0 + 0.0j
    for comp, profile in tm.components:
        total += potential_eval(comp, x) * profile(tau)
    return total
