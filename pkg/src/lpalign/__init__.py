"""Robust L^p (p < 1) estimation of geometric transforms.

Minimizing the sum of residual distances raised to a power below one keeps
the data-generating transform recoverable even when displaced pairs are the
majority, provided their error distances are spread out.  The package bundles
the estimator (exact candidate enumeration plus multi-start simplex search),
the closed-form minimum-inlier bounds that quantify when recovery is
guaranteed, and a deterministic Monte Carlo harness that verifies those
bounds on synthetic point sets.
"""

from .bounds import (
    BoundInputs,
    GroupSpec,
    cdf_below_group_bound,
    cdf_beyond_group_bound,
    equal_spacing_ratio,
    fill_oversized_gap,
    grouped_min_inliers,
    half_normal_remainder,
    hoeffding_window_exponent,
    min_inliers_equal_spacing,
    min_inliers_euclidean,
    min_inliers_euclidean_super,
    min_inliers_half_normal,
    min_inliers_rotation_2d,
    min_inliers_translation,
    rotation_exponent_limit,
    scaling_dominance,
    uniform_noise_bounds,
    worst_case_distance,
)
from .cost import CostParams, residual, total_cost
from .errors import (
    BoundValidityError,
    GridTooLargeError,
    InvalidInputError,
    UnsupportedModeError,
)
from .estimator import LpTransformEstimator
from .observations import ObservationSet
from .simulate import (
    NoiseSpec,
    TrialOutcome,
    breakdown_sweep,
    gen_instance,
    reproduce_pointset_experiment,
    run_trial,
)
from .solver import (
    EstimateResult,
    SolverConfig,
    candidate_translations,
    estimate_simplex,
    estimate_translation,
    grid_oracle,
)
from .transforms import (
    Transform,
    apply_transform,
    euclidean2d,
    normalize_angle,
    param_error,
    rotation2d,
    scaling,
    translation,
)

__version__ = "0.1.0"

__all__ = [
    "BoundInputs",
    "BoundValidityError",
    "CostParams",
    "EstimateResult",
    "GridTooLargeError",
    "GroupSpec",
    "InvalidInputError",
    "LpTransformEstimator",
    "NoiseSpec",
    "ObservationSet",
    "SolverConfig",
    "Transform",
    "TrialOutcome",
    "UnsupportedModeError",
    "apply_transform",
    "breakdown_sweep",
    "candidate_translations",
    "cdf_below_group_bound",
    "cdf_beyond_group_bound",
    "equal_spacing_ratio",
    "estimate_simplex",
    "estimate_translation",
    "euclidean2d",
    "fill_oversized_gap",
    "gen_instance",
    "grid_oracle",
    "grouped_min_inliers",
    "half_normal_remainder",
    "hoeffding_window_exponent",
    "min_inliers_equal_spacing",
    "min_inliers_euclidean",
    "min_inliers_euclidean_super",
    "min_inliers_half_normal",
    "min_inliers_rotation_2d",
    "min_inliers_translation",
    "normalize_angle",
    "param_error",
    "reproduce_pointset_experiment",
    "residual",
    "rotation2d",
    "rotation_exponent_limit",
    "run_trial",
    "scaling",
    "scaling_dominance",
    "total_cost",
    "translation",
    "uniform_noise_bounds",
    "worst_case_distance",
]
