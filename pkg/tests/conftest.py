import numpy as np
import pytest

from feynprop import (
    ExponentialMeasure,
    MorseParams,
    PropagatorQuery,
    QuadratureSpec,
    SpacetimePair,
    TestFunction,
    morse_measure,
)


@pytest.fixture(scope="session")
def morse_params():
    return MorseParams(2.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def morse_benchmark_query():
    """Morse g=0.1, d=1, x=0.2, x0=0, t-t0=0.5, theta=0."""
    measure = morse_measure(MorseParams(0.1, 1.0, 1.0))
    pair = SpacetimePair([0.2], [0.0], 0.5, 0.0)
    return PropagatorQuery(pair, 0.1, TestFunction(1), measure)


@pytest.fixture(scope="session")
def fast_quad():
    return QuadratureSpec(points=12, samples=1024, seed=0)


def single_atom_query(weight=1.0, alpha=1.0, x=0.0, x0=0.0, t=1.0, t0=0.0,
                      g=1.0, hbar=1.0, mass=1.0):
    measure = ExponentialMeasure(1, ((weight, (alpha,)),))
    pair = SpacetimePair([x], [x0], t, t0)
    return PropagatorQuery(pair, g, TestFunction(1), measure, hbar, mass)
