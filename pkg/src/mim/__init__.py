"""Marginal inferential models: prior-free, frequency-calibrated plausibility
inference for interest parameters in the presence of nuisance parameters.

The package exposes a small catalog of benchmark models, the scalar-pivot
machinery that turns a monotone pivot CDF into plausibility values and
regions, the elastic construction for the nonnegative mean-length problem,
and a reproducible Monte Carlo harness for calibration checks.
"""

from .core import (
    Assertion,
    RandomSetSpec,
    ScalarPivotIM,
    default_prs_contour,
    default_prs_miss_prob,
    elastic_mnm_plausibility,
    invert_pivot,
    pivot_belief,
    pivot_plausibility,
    pivot_region_plausibility,
)
from .errors import (
    AccuracyError,
    DegenerateDataError,
    NonMonotonePivotError,
    SearchError,
)
from .models import (
    CorrSummary,
    GammaSummary,
    MODEL_IDS,
    ModelInstance,
    NormalSummary,
    RatioData,
    TwoSampleSummary,
    VectorSummary,
    behrens_fisher_curve,
    behrens_fisher_im,
    behrens_fisher_interval,
    bvn_correlation_curve,
    bvn_correlation_im,
    curve_for,
    gamma_kappa,
    gamma_kappa_star,
    gamma_mean_curve,
    gamma_mean_im,
    load_rat_survival,
    many_normal_means_curve,
    many_normal_means_fiducial_region,
    many_normal_means_region,
    mean_ratio_curve,
    mean_ratio_plausibility,
    mean_ratio_region,
    mnm_psi_quantile,
    normal_mean_known_var_curve,
    normal_mean_known_var_im,
    normal_mean_known_var_interval,
    normal_mean_t_curve,
    normal_mean_t_im,
    normal_mean_t_interval,
    summarize_normal,
)
from .regions import (
    Piece,
    PlausibilityCurve,
    Region,
    SearchConfig,
    extract_region,
)
from .simulate import (
    SimulationConfig,
    SimulationModel,
    SimulationReport,
    bound_curves,
    prs_miss_uniformity,
    simulate_coverage,
    simulate_validity,
    substream,
)
from .special import (
    AccuracyPolicy,
    DEFAULT_POLICY,
    chisq_cdf,
    chisq_median,
    digamma,
    gamma_cdf,
    halft_mixture_cdf,
    halft_mixture_quantile,
    halft_scale,
    noncentral_chisq_cdf,
    sample_corr_cdf,
    sample_corr_density,
    std_normal_cdf,
    std_normal_quantile,
    student_t_cdf,
    student_t_quantile,
)

__version__ = "0.1.0"
