"""Nonparametric estimation and testing from b-bit quantized samples with periodic smoothing splines."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .dataio import Dataset, ingest_csv
from .estimator import FitResult, default_lambda_grid, evaluate, fit, gcv_log_scaled, gcv_scores, gcv_select, l2_distance_sq
from .exceptions import QuantSplineError
from .inference import TestResult, check_conditions, linearity_test, quantization_error_terms, quantization_test, separation_rate
from .kernel import KernelSpec, bernoulli_poly, kernel_K, kernel_K2, kernel_matrix
from .quantizer import (
    Quantizer,
    data_range_thresholds,
    empirical_optimal_marks,
    log_bit_testing_quantizer,
    midpoint_marks,
    population_optimal_marks,
    quantize_sample,
    uniform_symmetric_quantizer,
)
from .simulation import ExperimentConfig, ExperimentResult, run, run_experiment
from .spectral import SpectralQuantities, build_spectral, eigenvalues_from_row, eigenvalues_from_series, quadratic_form

__all__ = [
    "BACKEND",
    "Dataset",
    "ExperimentConfig",
    "ExperimentResult",
    "FitResult",
    "KernelSpec",
    "QuantSplineError",
    "Quantizer",
    "SpectralQuantities",
    "TestResult",
    "bernoulli_poly",
    "build_spectral",
    "check_conditions",
    "data_range_thresholds",
    "default_lambda_grid",
    "eigenvalues_from_row",
    "eigenvalues_from_series",
    "empirical_optimal_marks",
    "evaluate",
    "fit",
    "gcv_log_scaled",
    "gcv_scores",
    "gcv_select",
    "ingest_csv",
    "kernel_K",
    "kernel_K2",
    "kernel_matrix",
    "l2_distance_sq",
    "linearity_test",
    "log_bit_testing_quantizer",
    "midpoint_marks",
    "population_optimal_marks",
    "quadratic_form",
    "quantization_error_terms",
    "quantization_test",
    "quantize_sample",
    "run",
    "run_experiment",
    "separation_rate",
    "uniform_symmetric_quantizer",
]
