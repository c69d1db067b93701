"""Bell tests with time-bin and dissociation-time entangled matter waves."""

__version__ = "0.1.0"

from .params import HBAR, DteParams, derived_scales, switch_distinguishability
from .tbe import (
    OUTCOMES,
    MeasurementAxis,
    PortOutcome,
    TbeSettings,
    spin_correlation,
    tbe_amplitude,
    tbe_correlation,
    tbe_probability,
)
from .dte import DteSettings, dte_fringe_scan, dte_probability_gaussian, dte_visibility
from .oracle import (
    MomentumAmplitude,
    QuadratureSpec,
    dte_probability_quadrature,
    gaussian_distribution,
    momentum_phase_invariance_check,
    parity_symmetry_check,
)
from .bell import (
    ChshResult,
    ChshSettings,
    chsh_dte,
    chsh_optimize_dte,
    chsh_tbe,
    correlation_from_probabilities,
    feasibility_conditions,
)
