"""Optimal two-treatment multi-period crossover designs for weekly attendance schedules."""

from ._core import (
    ComputationError,
    Design,
    FitResult,
    ImbalanceCounts,
    InformationReport,
    RandomizationResult,
    Schedule,
    TrialDataset,
    ValidationError,
    construct_design,
    estimator_variance,
    fit_model,
    randomization_test,
    required_observations,
    required_weeks,
    simulate_trial,
    variance_mc,
    verdict,
)

__all__ = [
    "ComputationError",
    "Design",
    "FitResult",
    "ImbalanceCounts",
    "InformationReport",
    "RandomizationResult",
    "Schedule",
    "TrialDataset",
    "ValidationError",
    "construct_design",
    "estimator_variance",
    "fit_model",
    "randomization_test",
    "required_observations",
    "required_weeks",
    "simulate_trial",
    "variance_mc",
    "verdict",
]

__version__ = "0.1.0"
