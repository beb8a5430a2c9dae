"""Numerical core: bases, sub-models, solver, weight selection, evaluation."""

from .spline_basis import SplineSpec, make_spec, eval_basis
from .tau_basis import TauBasis, TauFamily, tau_grid
from .candidate_models import CandidateModel, ColumnKind, Dataset, build_design, predict_quantile, regression_vector
from .iqr_solver import FitConfig, FitResult, check_loss, fit, fit_loo, integrated_loss
from .jackknife_averaging import (
    AveragedModel,
    LooPredictions,
    WeightConfig,
    WeightVector,
    averaged_predict,
    cv_criterion,
    loo_predictions,
    optimize_weights,
)
from .evaluation import MethodResult, comparison_measures, crossing_diagnostic, oaqpe
from .baselines import equal_weight_model, fit_qlrm, fit_qrcm_linear, single_submodel

__all__ = [
    "SplineSpec", "make_spec", "eval_basis",
    "TauBasis", "TauFamily", "tau_grid",
    "CandidateModel", "ColumnKind", "Dataset", "build_design", "predict_quantile", "regression_vector",
    "FitConfig", "FitResult", "check_loss", "fit", "fit_loo", "integrated_loss",
    "AveragedModel", "LooPredictions", "WeightConfig", "WeightVector",
    "averaged_predict", "cv_criterion", "loo_predictions", "optimize_weights",
    "MethodResult", "comparison_measures", "crossing_diagnostic", "oaqpe",
    "equal_weight_model", "fit_qlrm", "fit_qrcm_linear", "single_submodel",
]
