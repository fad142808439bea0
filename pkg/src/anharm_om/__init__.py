"""Anharmonic (Morse) molecular optomechanics: rate ladders, blockade and lasing."""

from .morse import (
    HarmonicLadderError,
    LevelOutOfRange,
    MorseParams,
    bound_state_count,
    diagonal_element_approx,
    eigenfrequency,
    eigenfrequencies,
    position_element,
    position_matrix,
)
from .optics import HybridParams, SingleModeParams, make_spectrum, spectrum_hybrid, spectrum_single, spectrum_slope
from .rates import BathConfig, DriveConfig, RateLadder, dressed_frequencies, raman_rates, total_rates
from .special import digamma, log_gamma
from .steady_state import (
    SteadyStateResult,
    g2_closed_form,
    intensity_correlation,
    mechanical_population,
    solve_populations,
    steady_state,
    three_level_analytic,
)
from .lasing import (
    MeanFieldParams,
    TrajectoryResult,
    TrajectorySystem,
    integrate_trajectory,
    meanfield_steady,
    oscillation_stats,
    run_to_steady,
)

__version__ = "0.1.0"
