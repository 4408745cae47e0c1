"""Replicator dynamics of repeated snowdrift games with four reactive strategies.

The population shares of ALLC, TFT, STFT and ALLD players evolve on the
4-simplex under replicator dynamics driven by the m-round accumulated payoff
matrix.  The package constructs the matrices exactly, classifies the payoff
regime, enumerates every equilibrium, integrates the dynamics and verifies
the global convergence behaviour (every trajectory ends at an equilibrium
point, with the reachable set determined by the regime).
"""

from .game_core import (
    ALLC,
    ALLD,
    STFT,
    TFT,
    BasePayoffs,
    CoopCounts,
    PayoffMatrix,
    ReducedMatrix,
    RegimeClass,
    RepeatedGameSpec,
    SignStructure,
    SnowdriftViolation,
    build_repeated_matrix,
    classify_regime,
    cooperation_counts,
    reduce_matrix,
    shift_column,
    sign_structure,
    validate_snowdrift,
)
from .dynamics import (
    IntegratorConfig,
    RatioConstants,
    Trajectory,
    edge_dynamics,
    integrate,
    integrate_batch,
    line_restricted_rhs,
    ratio_constants,
    ratio_derivative,
    replicator_rhs,
    utility,
    zone_of,
)
from .equilibria import (
    Continuum,
    Equilibrium,
    EquilibriumCatalog,
    boundary_catalog,
    equilibrium_catalog,
    interior_equilibrium,
    residual,
    x123_membership,
)
from .stability import (
    EssReport,
    InteriorSpectrum,
    NashReport,
    check_ess,
    interior_spectrum,
    is_nash,
    jacobian_reduced,
    nash_interval_X12,
    singleton_nash_flags,
)
from .convergence import (
    BasinStats,
    LimitPrediction,
    SeparatrixSample,
    basin_sample,
    match_catalog,
    predict_limit,
    run_to_limit,
    separatrix_bisect,
    separatrix_sweep,
)
from .metrics import (
    MetricsRow,
    average_payoff,
    cooperation_level,
    gap_x23_x14,
    gap_xalpha_x14,
    sweep_R,
)

__version__ = "0.1.0"
