"""Sharp partial-identification bounds for treatment effects on ordinal outcomes."""

from .bounds import (
    BoundsReport,
    eta_bounds,
    full_report,
    independent_estimands,
    point_identified,
    tau_bounds,
)
from .coupling import TriangularMatrix, extremal_coupling, triangular_transport
from .datasets import bradley_counts, bradley_records
from .distributions import (
    DeltaVector,
    JointDistribution,
    MarginalDistribution,
    MarginalPair,
    delta_effects,
    empirical_marginals,
    estimands_of_joint,
    stochastically_dominates,
    validate_marginal,
)
from .estimation import (
    EstimatedBounds,
    UnitRecord,
    adjusted_bounds_from_strata,
    estimate_adjusted,
    estimate_ipw,
    estimate_randomized,
    ipw_marginals,
)
from .inference import (
    IntervalReport,
    bootstrap_bounds_ci,
    bootstrap_pair_ci_with_independent,
)
from .lp_oracle import LinearObjective, alpha_bounds, indicator_objective, optimize, sign_objective
from .models import (
    CumulativeLogitModel,
    LogitModel,
    MultinomialLogitModel,
    fit_cumulative_logit,
    fit_logit,
    fit_multinomial_logit,
    predict_marginal,
)
from .noncompliance import (
    ComplierBoundsReport,
    StrataModel,
    complier_bounds,
    em_fit,
    em_fit_with_covariates,
    estimands_relation,
    moment_identify,
)
from .simulation import (
    StudyResult,
    StudySpec,
    generate_study1,
    generate_study2,
    run_study,
    study1_truth,
    study2_truth,
)

__all__ = [
    "BoundsReport",
    "ComplierBoundsReport",
    "CumulativeLogitModel",
    "DeltaVector",
    "EstimatedBounds",
    "IntervalReport",
    "JointDistribution",
    "LinearObjective",
    "LogitModel",
    "MarginalDistribution",
    "MarginalPair",
    "MultinomialLogitModel",
    "StrataModel",
    "StudyResult",
    "StudySpec",
    "TriangularMatrix",
    "UnitRecord",
    "adjusted_bounds_from_strata",
    "alpha_bounds",
    "bootstrap_bounds_ci",
    "bootstrap_pair_ci_with_independent",
    "bradley_counts",
    "bradley_records",
    "complier_bounds",
    "delta_effects",
    "em_fit",
    "em_fit_with_covariates",
    "empirical_marginals",
    "estimands_of_joint",
    "estimands_relation",
    "estimate_adjusted",
    "estimate_ipw",
    "estimate_randomized",
    "eta_bounds",
    "extremal_coupling",
    "fit_cumulative_logit",
    "fit_logit",
    "fit_multinomial_logit",
    "full_report",
    "generate_study1",
    "generate_study2",
    "indicator_objective",
    "independent_estimands",
    "ipw_marginals",
    "moment_identify",
    "optimize",
    "point_identified",
    "predict_marginal",
    "run_study",
    "sign_objective",
    "stochastically_dominates",
    "study1_truth",
    "study2_truth",
    "tau_bounds",
    "triangular_transport",
    "validate_marginal",
]

__version__ = "0.1.0"
