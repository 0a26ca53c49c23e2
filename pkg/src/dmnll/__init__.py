"""Exact Dirichlet-multinomial log-likelihoods, stable down to the multinomial limit."""

from .core import (
    AlphaParams,
    CountVector,
    DimensionMismatchError,
    DmnError,
    DomainError,
    LogLikResult,
    MeanPhiParams,
    Method,
    ResourceLimitError,
    dmn_log_pmf,
    dmn_loglik_exact,
    dmn_loglik_lgamma,
    dmn_loglik_phi,
    log_multinomial_coef,
    mn_log_pmf,
    mn_loglik_kernel,
    params_from_mean_phi,
)
from .estimate import Dataset, FitResult, fit_alpha_mle, grad_loglik, loglik_dataset
from .bench import (
    BenchRecord,
    ExperimentConfig,
    accuracy_defaults,
    reference_loglik,
    run_accuracy_experiment,
    run_runtime_experiment,
    runtime_defaults,
)
from .sampling import sample_dmn_dataset, sample_mn_dataset

__version__ = "0.1.0"

__all__ = [
    "AlphaParams",
    "BenchRecord",
    "CountVector",
    "Dataset",
    "DimensionMismatchError",
    "DmnError",
    "DomainError",
    "ExperimentConfig",
    "FitResult",
    "LogLikResult",
    "MeanPhiParams",
    "Method",
    "ResourceLimitError",
    "accuracy_defaults",
    "dmn_log_pmf",
    "dmn_loglik_exact",
    "dmn_loglik_lgamma",
    "dmn_loglik_phi",
    "fit_alpha_mle",
    "grad_loglik",
    "log_multinomial_coef",
    "loglik_dataset",
    "mn_log_pmf",
    "mn_loglik_kernel",
    "params_from_mean_phi",
    "reference_loglik",
    "run_accuracy_experiment",
    "run_runtime_experiment",
    "runtime_defaults",
    "sample_dmn_dataset",
    "sample_mn_dataset",
    "__version__",
]
