"""Quadrature-node plumbing shared by the series engines: tensor
Gauss-Legendre grids on [0,1]^n, scrambled Sobol point sets, and the
multiset reduction over atom tuples.

Reductions everywhere use plain elementwise products with np.sum (pairwise,
single-threaded) rather than BLAS-backed matmul, so results are bit-stable
regardless of the ambient thread count.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np
from scipy.stats import qmc

CHUNK = 1 << 16


def chunk_rows(n: int) -> int:
    """Node rows per chunk, sized so the (rows, n, n) bridge intermediates
    stay around 32 MB."""
    return max(64, min(CHUNK, (1 << 22) // max(n * n, 1)))


@lru_cache(maxsize=32)
def gauss_nodes_unit(points: int):
    """Gauss-Legendre nodes/weights mapped to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(points)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=8)
def tensor_nodes_unit(n: int, points: int):
    """Tensor product grid on [0,1]^n: nodes (m, n) and weights (m,)."""
    x, w = gauss_nodes_unit(points)
    grids = np.meshgrid(*([x] * n), indexing="ij")
    nodes = np.stack([g.reshape(-1) for g in grids], axis=1)
    wts = np.ones(nodes.shape[0])
    for g in np.meshgrid(*([w] * n), indexing="ij"):
        wts = wts * g.reshape(-1)
    return nodes, wts


def sobol_scramblings(n: int, samples: int, seed: int, count: int):
    """``count`` independently scrambled Sobol point sets in [0,1)^n.

    The sample count is rounded up to the next power of two to keep the
    point sets balanced.
    """
    m = max(int(samples), 2)
    log2m = int(math.ceil(math.log2(m)))
    children = np.random.SeedSequence(seed).spawn(count)
    sets = []
    for child in children:
        engine = qmc.Sobol(d=n, scramble=True, seed=np.random.default_rng(child))
        sets.append(engine.random_base2(log2m))
    return sets


def atom_multisets(n_atoms: int, n: int):
    """Multisets of atom indices with their multinomial counts.

    The sigma integrand is invariant under simultaneous permutation of the
    (alpha_j, sigma_j) slots, so the K^n ordered-tuple sum collapses to
    C(K+n-1, n) multisets weighted by n! / prod(multiplicities!).
    """
    fact_n = math.factorial(n)
    for combo in combinations_with_replacement(range(n_atoms), n):
        count = fact_n
        run = 1
        for i in range(1, n):
            run = run + 1 if combo[i] == combo[i - 1] else 1
            if run > 1:
                count //= run
        yield combo, count


def bridge_q(gram: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    """Q = sum_{jk} G_jk (sigma_j sigma_k - min(sigma_j, sigma_k)) per node.

    nodes has shape (m, n); returns (m,). Callers chunk for memory.
    """
    outer = nodes[:, :, None] * nodes[:, None, :]
    minm = np.minimum(nodes[:, :, None], nodes[:, None, :])
    return ((outer - minm) * gram).sum(axis=(1, 2))


def kahan_sum(values) -> complex:
    """Compensated complex summation in the given (fixed) order."""
    total = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    for v in values:
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total
