"""Sparse linear classification and quantile regression with sorted-L1 penalties.

Smoothed hinge/quantile losses, the sorted-L1 proximal operator, an
accelerated proximal-gradient solver with warm-started penalty paths, and a
reproducible synthetic benchmark harness.
"""

from .losses import Dataset, LossFamily, LossModel, empirical_risk, loss_subgradient, loss_value
from .smoothing import (
    DEFAULT_TAU,
    SmoothedLoss,
    dual_weights,
    gram_spectral_norm,
    lipschitz_constant,
    smoothed_gradient,
    smoothed_risk,
)
from .prox import Regularizer, apply_prox, l2_shrink, prox_sorted_l1, slope_norm, soft_threshold
from .solver import (
    DivergenceError,
    FitResult,
    PathResult,
    SolverConfig,
    composite_objective,
    eta_max,
    fit,
    fit_path,
    slope_weights_default,
)
from .datagen import ExperimentSpec, dataset_to_csv, generate, stream, theoretical_minimizer
from .experiments import (
    MetricsReport,
    RateCheckReport,
    emit_report,
    run_rate_check,
    run_table,
)

__all__ = [
    "Dataset",
    "LossFamily",
    "LossModel",
    "empirical_risk",
    "loss_subgradient",
    "loss_value",
    "DEFAULT_TAU",
    "SmoothedLoss",
    "dual_weights",
    "gram_spectral_norm",
    "lipschitz_constant",
    "smoothed_gradient",
    "smoothed_risk",
    "Regularizer",
    "apply_prox",
    "l2_shrink",
    "prox_sorted_l1",
    "slope_norm",
    "soft_threshold",
    "DivergenceError",
    "FitResult",
    "PathResult",
    "SolverConfig",
    "composite_objective",
    "eta_max",
    "fit",
    "fit_path",
    "slope_weights_default",
    "ExperimentSpec",
    "dataset_to_csv",
    "generate",
    "stream",
    "theoretical_minimizer",
    "MetricsReport",
    "RateCheckReport",
    "emit_report",
    "run_rate_check",
    "run_table",
]

__version__ = "0.1.0"
