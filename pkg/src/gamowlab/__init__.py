"""Resonance poles, Gamow states and decay laws for a solvable delta-shell model."""

__version__ = "0.1.0"

from .effective import EffectiveModel, evolve_effective, intensity
from .errors import (
    BoundaryError,
    ConfigError,
    ContourError,
    ConvergenceError,
    DecompositionError,
    DegeneratePoleError,
    DomainError,
    GamowLabError,
    IncompleteScanError,
    NoResonanceError,
    NotAResonance,
    NumericalError,
    OracleError,
    ParseError,
    PoleError,
    QuadratureError,
    SemigroupDomainError,
    ValidationError,
)
from .gamow import (
    GamowState,
    HardyTestFunction,
    anti_hardy_example,
    bw_amplitude,
    bw_survival,
    causal_amplitude,
    eigenvalue_pairing_residual,
    hardy_suite,
    lineshape,
    semigroup_phase,
)
from .poles import ResonancePole, SearchRegion, count_zeros, find_pole, jost_derivative, scan_poles
from .scattering import DeltaShellModel, jost_function, jost_function_derivative, radial_ode_oracle, s_matrix
from .spectral import (
    PreparedState,
    RotatedContour,
    SurvivalDecomposition,
    background_integral,
    decompose,
    direct_survival,
    gamow_coefficient,
    sector_poles,
    standard_state,
)
