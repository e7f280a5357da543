"""Two incoherently pumped emitters coupled to a lossy plasmon mode.

Closed-form steady states, moment dynamics, a brute-force master-equation
reference, the nanorod near field and sweep tooling.
"""

from .params import (
    DEFAULT_REGIME_THRESHOLD,
    CouplingSpec,
    DerivedScalars,
    Diagnostic,
    EmitterParams,
    Populations,
    derive_scalars,
    populations_from_inversion,
    validate_regime,
)
from .steady import (
    NoEmissionError,
    SteadyReport,
    gamma_opt,
    max_rqe,
    normalized_plasmon_number,
    optimal_coupling,
    plasmon_number,
    rqe,
    rqe_high_pump,
    stationary_correlations,
    stationary_single_emitter,
    stationary_two_emitters,
    steady_report,
    superradiance_term,
)
from .moments import (
    KERNEL,
    IntegrationError,
    MomentState,
    SingularSystemError,
    Trajectory,
    integrate_moments,
    moment_matrix,
    moment_rhs,
    plasmon_number_from_moments,
    steady_state_linear,
)
from .nearfield import (
    DarkModeField,
    EmitterSite,
    NanorodSpec,
    SingularPositionError,
    coupling_from_position,
    dark_mode_field,
    dipole_field,
    field_map,
    mode_frequencies,
    radial_profiles,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
