"""Bayesian step-down multiple testing for correlated normal means."""

__version__ = "0.1.0"

from .baselines import adaptive_bh, bh_step_up, bonferroni, by_step_up, two_sided_pvalues
from .bsd import ActiveSet, StepTrace, bsd_stat_fast, bsd_stat_naive, bsd_stat_via_mrd, bsd_step_down
from .estimators import EstimatorConfig, estimate_p, estimate_params, estimate_v
from .linalg import NotPositiveDefiniteError
from .model import CovarianceFamily, GroundTruth, MixtureParams, build_covariance, sample_dataset
from .mrd import default_critical_sequence, mrd_residual, mrd_step_down

__all__ = [
    "ActiveSet",
    "CovarianceFamily",
    "EstimatorConfig",
    "GroundTruth",
    "MixtureParams",
    "NotPositiveDefiniteError",
    "StepTrace",
    "adaptive_bh",
    "bh_step_up",
    "bonferroni",
    "bsd_stat_fast",
    "bsd_stat_naive",
    "bsd_stat_via_mrd",
    "bsd_step_down",
    "build_covariance",
    "by_step_up",
    "default_critical_sequence",
    "estimate_p",
    "estimate_params",
    "estimate_v",
    "mrd_residual",
    "mrd_step_down",
    "sample_dataset",
    "two_sided_pvalues",
]
