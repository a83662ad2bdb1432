"""Finite-sample and limiting error rates of LDA and ridge-regularized LDA
in the regime where the dimension grows with the sample size."""

from .classifiers import (
                          ConditionalErrorReport,
                          PooledStats,
                          conditional_error,
                          empirical_error,
                          fit_bayes,
                          fit_corrected_lda,
                          fit_corrected_rlda,
                          fit_lda,
                          fit_naive_bayes,
                          fit_oracle_intercept,
                          fit_rlda,
                          predict,
)
from .errors import (
                          ConfigError,
                          DimLDAError,
                          DomainError,
                          NumericalError,
                          SingularityError,
                          ValidationError,
)
from .select import select_lambda, select_lambda_cv
from .types import (
                          FittedLinearClassifier,
                          LabeledDataset,
                          Method,
                          ProblemSpec,
                          SpectralModel,
                          make_spectral_model,
                          validate,
)

__version__ = "0.1.0"

__all__ = [
                          "ConditionalErrorReport",
                          "ConfigError",
                          "DimLDAError",
                          "DomainError",
                          "FittedLinearClassifier",
                          "LabeledDataset",
                          "Method",
                          "NumericalError",
                          "PooledStats",
                          "ProblemSpec",
                          "SingularityError",
                          "SpectralModel",
                          "ValidationError",
                          "__version__",
                          "conditional_error",
                          "empirical_error",
                          "fit_bayes",
                          "fit_corrected_lda",
                          "fit_corrected_rlda",
                          "fit_lda",
                          "fit_naive_bayes",
                          "fit_oracle_intercept",
                          "fit_rlda",
                          "make_spectral_model",
                          "predict",
                          "select_lambda",
                          "select_lambda_cv",
                          "validate",
]
