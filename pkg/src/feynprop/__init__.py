"""feynprop: convergent perturbation series for Schrodinger propagators
with exponential-class potentials V(x) = sum_k w_k exp(alpha_k . x),
the Morse closed forms, and the divergent imaginary-mass continuation.
"""

from .dyson import (
    N_MAX,
    PropagatorQuery,
    QuadratureSpec,
    SeriesResult,
    bridge_quadratic,
    order_term_sigma,
    order_term_tau,
    propagate_gaussian_packet,
    propagator,
    propagator_timedep,
    schrodinger_residual,
    t_transform_product,
    tail_bound,
)
from .errors import (
    ConfigError,
    ConvergenceBudgetError,
    DomainTooSmallError,
    FeynpropError,
    GreenFormError,
    PoleError,
    PrecisionLossError,
    UnsupportedError,
)
from .field import GaussianBump, TestFunction, zero_field
from .freeprop import SpacetimePair, free_kernel, free_kernel_with_field, t_transform_free
from .heat import (
    HeatQuery,
    default_a0,
    divergence_growth_threshold,
    divergence_lower_bound,
    divergence_lower_bound_log10,
    heat_term,
    heat_term_log10,
)
from .measure import (
    ExponentialMeasure,
    TimeDependentMeasure,
    TimeProfile,
    exponential_moment,
    potential_eval,
    potential_eval_timedep,
    weighted_moment,
)
from .morse import (
    GreenQuery,
    MorseEigenfunction,
    MorseParams,
    green_nonanalyticity_ratios,
    morse_eigenfunction,
    morse_green,
    morse_measure,
    morse_potential,
    morse_series_term,
    morse_spectrum,
)

__version__ = "0.1.0"
