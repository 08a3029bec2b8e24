"""Generalized riffle shuffles: cut-size measures, mixing-time constants,
exact small-deck laws, trajectory graphs, and cold-spot uniformity tests.
"""

__version__ = "0.1.0"

from .coldspot import (
    CellQuota,
    ColdSpotSet,
    TestReport,
    ascent_statistic,
    build_cold_spots,
    cold_spot_test,
    floor_with_tolerance,
    idealized_pile_sequence,
    is_collision_likely,
)
from .constants import (
    ConstantsBundle,
    TABLE1_MEASURES,
    constants_bundle,
    entropy_H,
    info_I,
    phi,
    psi,
    psi_mu,
    solve_theta,
    table1_bundles,
    uniform_point_constants,
)
from .errors import (
    AllZero,
    CounterexampleFailed,
    DegenerateMeasure,
    DegenerateMixture,
    InvalidChi,
    InvalidParams,
    NoBracket,
    NotInPsiClass,
    QuotaInfeasible,
    RiffleError,
    ScaleTooSmall,
    SizeMismatch,
    TooFewSteps,
    TooLarge,
    VertexPoint,
)
from .exact import exact_shuffle_distribution, exact_tv, exact_tv_curve
from .hypergeom import (
    ConcentrationReport,
    concentration_report,
    hypergeometric_sample,
    logpmf,
    pmf_table,
    proof_shape_bound,
    support,
    tail_two_sided,
)
from .measures import (
    Beta,
    CellDecomposition,
    Dirichlet,
    Empirical,
    FiniteMixture,
    PointMass,
    PrecisionConfig,
    UniformInterval,
    as_simplex_point,
    discretize_measure,
    expect_functional,
    measure_from_json,
    p_max,
    sample_point,
)
from .permstats import (
    ascent_positions,
    count_ascents,
    inverse_deck,
    longest_increasing_run,
    rising_sequences,
)
from .processes import (
    ExactBisection,
    ExplicitSequence,
    IIDFromMeasure,
    IIDMultinomial,
    Periodic,
    UniformCut,
    cut_sizes,
    enumerate_step_laws,
    gsr,
    pile_sequence,
    process_from_json,
    round_largest_remainder,
)
from .psiclass import (
    NonConvexityReport,
    PiecewiseAffine,
    SimplexHandle,
    appendix_f,
    appendix_f_breve,
    appendix_f_hat,
    average_f,
    discretize_f_to_simplex,
    make_piecewise_f,
    theta_and_cbar_of_f,
    verify_nonconvexity,
)
from .rng import stream
from .scans import (
    cold_spot_calibration,
    cold_spot_power,
    cutoff_scan,
    first_moment_scan,
    first_moment_trend,
    sample_shuffle_blocks,
    sample_shuffled_deck,
    sparsity_scan,
    tv_lower_bound_mc,
    wilson_interval,
)
from .shuffling import (
    ShuffleGraph,
    deck_from_blocks,
    enumerate_inverse_law,
    graph_sort,
    is_L_sparse,
    is_almost_mu_like,
    is_chi_good,
    lambda_of_prefix,
    prefix_interval,
    riffle_once,
    sample_inverse_shuffled_perm,
    sample_shuffle_matrix,
    shared_edges,
    shuffle_K,
    shuffle_graph,
    sort_lex,
)
