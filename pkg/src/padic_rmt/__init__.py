"""Exact singular-number arithmetic for matrices over the p-adic numbers,
random-matrix-product simulation, and exact Hall-Littlewood predictions."""

from .errors import (
    ConstraintViolated,
    DegenerateCovariance,
    DenominatorNotInvertible,
    DimensionMismatch,
    IndexOutOfRange,
    InequalityViolated,
    KernelPole,
    NotInterlacing,
    PadicRmtError,
    PrecisionExhausted,
    RepeatedPoints,
    SingularMatrix,
    ZeroPointWithNegativeWeight,
)
from .padic import (
    PadicMatrix,
    PadicScalar,
    Prime,
    Signature,
    corner,
    delete_row,
    diag_signature,
    matmul,
    minor_valuation_profile,
    reduce,
    singular_numbers_via_minors,
    smith_singular_numbers,
    valuation,
)
from .rng import RngStream
from .ensembles import (
    CornerOfHaar,
    EnsembleSpec,
    FixedSN,
    GSpFixedSN,
    GSpHaar,
    HaarEntries,
    SNMixture,
    draw_step_matrix,
    sample_bi_invariant,
    sample_corner_of_haar,
    sample_haar_gl,
    sample_uniform_residue,
)
from .hall_littlewood import (
    InterlacingChain,
    SignatureDistribution,
    UniPoly,
    cauchy_kernel,
    corner_distribution,
    corner_weight_covariance,
    corner_weight_pgf,
    enumerate_chains,
    expected_corner_weight,
    haar_corner_increment_mean,
    haar_corner_increment_pgf,
    hl_haar_corner_measure,
    hl_p_eval,
    hl_p_symmetrized_oracle,
    hl_q_eval,
    hl_skew_eval,
    joint_corner_distribution,
    kth_corner_distribution,
    lln_prediction,
    principal_specialization,
    psi,
    verify_corner_inequality,
)
from .processes import (
    CounterexampleSource,
    EnsembleSource,
    InterpolatingState,
    Trajectory,
    TrajectoryStep,
    check_equal_difference,
    corner_weights,
    interpolation_step,
    lyapunov_estimates,
    product_step,
    run_coupled_trajectory,
    split_margins,
)
from .symplectic import (
    GSpElement,
    SymplecticForm,
    gsp_corner_weights,
    gsp_singular_numbers,
    is_gsp,
    sample_bi_invariant_gsp,
    sample_haar_gsp,
)
from .stats import (
    ExperimentConfig,
    ExperimentReport,
    Tolerances,
    chi_square_gof,
    run_bounded_difference_experiment,
    run_clt_experiment,
    run_lln_experiment,
    tv_distance,
)
from .presets import build_preset, preset_names

__version__ = "0.1.0"
