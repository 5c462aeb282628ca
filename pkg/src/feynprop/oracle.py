"""Independent numerical ground truth for the closed forms and the series:
Crank-Nicolson time evolution, finite-difference Hamiltonian eigenvalues,
and brute-force low-dimensional Simpson quadrature.

Dirichlet boundaries with generous padding, rather than absorbing layers:
the benchmarks keep amplitude away from the edges, and the plain Cayley
step stays exactly unitary for real potentials, which is what makes the
oracle trustworthy.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal, solve_banded

from .errors import DomainTooSmallError, UnsupportedError

__all__ = [
    "Grid1D",
    "WaveFunction",
    "gaussian_packet",
    "free_gaussian_evolution",
    "cn_evolve",
    "hamiltonian_eigs",
    "brute_quad",
]


@dataclass(frozen=True)
class Grid1D:
    xmin: float
    xmax: float
    npoints: int

    def __post_init__(self):
        if self.npoints < 16:
            raise ValueError("grid needs at least 16 points")
        if not self.xmax > self.xmin:
            raise ValueError("require xmax > xmin")

    @property
    def h(self) -> float:
        return (self.xmax - self.xmin) / (self.npoints - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.xmin, self.xmax, self.npoints)


@dataclass(frozen=True)
class WaveFunction:
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.npoints,):
            raise ValueError("values length differs from grid")
        object.__setattr__(self, "values", values)

    def norm(self) -> float:
        return math.sqrt(self.grid.h * float((np.abs(self.values) ** 2).sum()))


def gaussian_packet(grid: Grid1D, sigma: float, center: float = 0.0,
                    k0: float = 0.0) -> WaveFunction:
    """(2 pi sigma^2)^(-1/4) exp(-(x-center)^2/(4 sigma^2) + i k0 x)."""
    if sigma <= 0:
        raise ValueError("packet width must be positive")
    x = grid.x
    vals = (2.0 * math.pi * sigma ** 2) ** -0.25 * np.exp(
        -((x - center) ** 2) / (4.0 * sigma ** 2) + 1j * k0 * x
    )
    return WaveFunction(grid, vals)


def free_gaussian_evolution(x, t: float, sigma: float, center: float = 0.0,
                            k0: float = 0.0, hbar: float = 1.0,
                            mass: float = 1.0) -> np.ndarray:
    """Exact free evolution of the Gaussian packet above, at time t > 0."""
    x = np.asarray(x, dtype=float)
    k2 = mass / (hbar * t)
    p = 1.0 / (4.0 * sigma ** 2) - 0.5j * k2
    qlin = 1j * k0 + center / (2.0 * sigma ** 2) - 1j * k2 * x
    r = 0.5j * k2 * x ** 2 - center ** 2 / (4.0 * sigma ** 2)
    kpref = cmath.exp(-1j * math.pi / 4.0) * (2.0 * math.pi * hbar * t / mass) ** -0.5
    n0 = (2.0 * math.pi * sigma ** 2) ** -0.25
    return kpref * n0 * cmath.sqrt(math.pi / p) * np.exp(qlin ** 2 / (4.0 * p) + r)


def cn_evolve(psi0: WaveFunction, potential, t0: float, t: float, dt: float,
              hbar: float = 1.0, mass: float = 1.0,
              time_dependent: bool = False) -> WaveFunction:
    """Crank-Nicolson evolution of psi0 from t0 to t:

        (1 + i dt H / (2 hbar)) psi_{k+1} = (1 - i dt H / (2 hbar)) psi_k

    with the tridiagonal H = -(hbar^2 / 2 mass) Lap_h + V and Dirichlet
    boundaries. ``potential`` is called as potential(x_array, tau). For a
    real static potential the step is unitary; a norm drift above 1e-6
    means the domain is too small and raises DomainTooSmallError.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if not t > t0:
        raise ValueError("require t > t0")
    grid = psi0.grid
    x = grid.x
    nsteps = max(1, int(round((t - t0) / dt)))
    step = (t - t0) / nsteps
    c = hbar ** 2 / (2.0 * mass * grid.h ** 2)
    lam = step / (2.0 * hbar)

    def banded_for(v):
        diag = 2.0 * c + v
        ab = np.zeros((3, grid.npoints), dtype=complex)
        ab[0, 1:] = 1j * lam * (-c)
        ab[1, :] = 1.0 + 1j * lam * diag
        ab[2, :-1] = 1j * lam * (-c)
        return ab, diag

    v0 = np.asarray(potential(x, t0), dtype=complex)
    static_real = not time_dependent and np.all(v0.imag == 0.0)
    if not time_dependent:
        ab, diag = banded_for(v0)

    psi = psi0.values.copy()
    norm0 = psi0.norm()
    for k in range(nsteps):
        if time_dependent:
            tau_mid = t0 + (k + 0.5) * step
            ab, diag = banded_for(np.asarray(potential(x, tau_mid), dtype=complex))
        rhs = (1.0 - 1j * lam * diag) * psi
        rhs[:-1] += 1j * lam * c * psi[1:]
        rhs[1:] += 1j * lam * c * psi[:-1]
        psi = solve_banded((1, 1), ab, rhs)

    out = WaveFunction(grid, psi)
    peak = float(np.abs(psi).max())
    edge = max(abs(psi[0]), abs(psi[-1]))
    if peak > 0 and edge > 1e-6 * peak:
        raise DomainTooSmallError(
            f"boundary amplitude {edge / peak:.2e} of peak; enlarge the grid"
        )
    if static_real and norm0 > 0:
        drift = abs(out.norm() - norm0) / norm0
        if drift > 1e-6:
            raise DomainTooSmallError(
                f"norm drifted by {drift:.2e}; enlarge the grid"
            )
    return out


def hamiltonian_eigs(grid: Grid1D, potential, k: int, hbar: float = 1.0,
                     mass: float = 1.0) -> np.ndarray:
    """k lowest eigenvalues of the symmetric tridiagonal FD Hamiltonian
    (bisection + inverse iteration via LAPACK)."""
    if k < 1:
        raise ValueError("need k >= 1")
    if k > grid.npoints:
        raise ValueError("k exceeds grid size")
    x = grid.x
    v = potential(x) if callable(potential) else np.asarray(potential, dtype=float)
    c = hbar ** 2 / (2.0 * mass * grid.h ** 2)
    diag = 2.0 * c + v
    off = np.full(grid.npoints - 1, -c)
    return eigh_tridiagonal(
        diag, off, select="i", select_range=(0, k - 1), eigvals_only=True
    )


def _simpson_weights(panels: int) -> np.ndarray:
    w = np.ones(2 * panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / (3.0 * 2 * panels)


def brute_quad(f, n: int, panels: int, return_error: bool = False):
    """Composite Simpson tensor rule for int over [0,1]^n, n <= 3.

    ``f`` receives an (m, n) array of nodes and returns m values. With
    return_error=True also returns the panel-doubling Richardson estimate.
    """
    if n > 3:
        raise UnsupportedError("brute-force quadrature supports n <= 3 only")
    if n < 1 or panels < 1:
        raise ValueError("need n >= 1 and panels >= 1")

    def run(p):
        pts = np.linspace(0.0, 1.0, 2 * p + 1)
        w1 = _simpson_weights(p)
        grids = np.meshgrid(*([pts] * n), indexing="ij")
        nodes = np.stack([g.reshape(-1) for g in grids], axis=1)
        wts = np.ones(nodes.shape[0])
        for g in np.meshgrid(*([w1] * n), indexing="ij"):
            wts = wts * g.reshape(-1)
        return complex((wts * np.asarray(f(nodes))).sum())

    fine = run(panels)
    if not return_error:
        return fine
    coarse = run(max(1, panels // 2))
    return fine, abs(fine - coarse) / 15.0
