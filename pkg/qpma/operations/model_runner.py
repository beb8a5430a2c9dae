"""
Model pipelines behind the fit, weights and predict commands.
"""

from dataclasses import replace
from typing import Any, Dict, List, Optional

import numpy as np

from ..core.candidate_models import Dataset, fit_specs
from ..core.evaluation import crossing_diagnostic
from ..core.iqr_solver import FitResult, default_smoothing
from ..core.jackknife_averaging import (
    AveragedModel,
    WeightResult,
    WeightVector,
    build_candidates,
    fit_candidates,
    loo_predictions,
    loo_tensor,
    optimize_weights,
)
from ..core.tau_basis import tau_grid, thin_grid
from ..errors import DataError
from ..utils.logger import get_logger
from .config_handler import RunConfig
from .model_store import FittedModel


class ModelRunner:
    """
    Fits averaged models, re-estimates their weights and predicts from them.

    This class wires the numerical core together the same way for every
    command, and records the diagnostics that go into the model file.
    """

    def __init__(self, config: RunConfig, workers: int = 1, logger=None):
        self.config = config
        self.workers = max(1, int(workers))
        self.logger = logger or get_logger('model_runner')

    def _grids(self, n: int):
        grid = tau_grid(self.config.fit.grid_size or n)
        return grid, thin_grid(grid, self.config.weights.thin)

    def fit(self, data: Dataset, response: str = "y") -> FittedModel:
        """Fit every candidate, select jackknife weights and assemble the averaged model."""
        cfg = self.config
        grid, cv_grid = self._grids(data.n)
        self.logger.info(f"Fitting {data.p} candidate sub-models on n={data.n} rows "
                         f"(basis {cfg.basis.name}, tau grid {grid.size}, cv grid {cv_grid.size})")

        specs = fit_specs(data, cfg.knots, cfg.spline_order)
        fits = fit_candidates(data, specs, cfg.basis, cfg.fit, self.workers)
        candidates = build_candidates(data, fits, cfg.basis)
        for candidate in candidates:
            if not candidate.converged:
                self.logger.warning(f"{candidate.name} did not converge within {cfg.fit.max_iters} iterations")

        if len(candidates) == 1:
            self.logger.info("Single continuous covariate: weight (1) without cross-validation")
            selected = None
            weights = WeightVector(np.ones(1))
        else:
            if data.n < 2:
                raise DataError("weight selection needs at least two observations")
            loo = loo_predictions(data, specs, cfg.basis, cfg.fit, cv_grid, fits=fits, workers=self.workers)
            selected = optimize_weights(loo, cfg.weights)
            weights = selected.weights

        model = AveragedModel(candidates=candidates, weights=weights, column_names=data.column_names)
        smoothing = {s: fits.fits[s].smoothing for s in fits.fits}
        iterations = {s: fits.fits[s].n_iter for s in fits.fits}
        diagnostics = self._diagnostics(model, data, grid, cv_grid, selected, smoothing, iterations)
        self.logger.info(f"Selected weights: {self._describe(model)}")
        return FittedModel(model=model, response=response, column_kinds=data.column_kind,
                           diagnostics=diagnostics, config=cfg.to_dict())

    def estimate_weights(self, fitted: FittedModel, data: Dataset) -> FittedModel:
        """Re-run jackknife weight selection for stored candidates on their training data."""
        if tuple(data.column_names) != tuple(fitted.column_names):
            raise DataError(f"data columns {list(data.column_names)} do not match the model's "
                            f"{list(fitted.column_names)}")
        candidates = fitted.candidates
        grid, cv_grid = self._grids(data.n)
        if len(candidates) == 1:
            model, selected = fitted.model, None
        else:
            smoothing = fitted.candidate_smoothing()
            fallback = default_smoothing(data.y) / 2 ** self.config.fit.continuation
            full_fits = [
                FitResult(theta=c.theta, converged=c.converged, objective=c.objective,
                          smoothed_objective=float("nan"), smoothing=smoothing.get(c.s, fallback), n_iter=0)
                for c in candidates
            ]
            loo = loo_tensor(
                [c.design(data.x) for c in candidates], data.y, fitted.model.tau_basis, self.config.fit,
                cv_grid, full_fits=full_fits, workers=self.workers, labels=[c.s for c in candidates],
            )
            selected = optimize_weights(loo, self.config.weights)
            model = replace(fitted.model, weights=selected.weights)

        stored = fitted.diagnostics.get("candidates", [])
        diagnostics = self._diagnostics(
            model, data, grid, cv_grid, selected,
            {int(c["s"]): c.get("smoothing") for c in stored},
            {int(c["s"]): c.get("n_iter") for c in stored},
        )
        self.logger.info(f"Re-estimated weights: {self._describe(model)}")
        config = dict(fitted.config)
        config["weights"] = self.config.weights.to_dict()
        return replace(fitted, model=model, diagnostics=diagnostics, config=config)

    def predict(self, fitted: FittedModel, x: np.ndarray, taus) -> np.ndarray:
        """Averaged predictions, one column per tau; crossings are reported, not repaired."""
        taus = np.asarray(taus, dtype=float)
        predictions = fitted.model.predict_matrix(x, taus)
        if taus.size > 1:
            crossed = np.any(np.diff(predictions, axis=1) < 0, axis=1)
            if crossed.any():
                self.logger.warning(f"Quantile crossing in {int(crossed.sum())} of {crossed.size} rows "
                                    f"(rows {(np.flatnonzero(crossed)[:10] + 1).tolist()}...)")
        return predictions

    @staticmethod
    def _describe(model: AveragedModel) -> str:
        return ", ".join(f"{c.name}={w:.4f}" for c, w in zip(model.candidates, model.weights.w))

    @staticmethod
    def _diagnostics(model: AveragedModel, data: Dataset, grid, cv_grid,
                     selected: Optional[WeightResult], smoothing: Dict[int, Any],
                     iterations: Dict[int, Any]) -> Dict[str, Any]:
        candidates: List[Dict[str, Any]] = [
            {
                "s": c.s,
                "name": c.name,
                "converged": bool(c.converged),
                "objective": float(c.objective),
                "smoothing": None if smoothing.get(c.s) is None else float(smoothing[c.s]),
                "n_iter": None if iterations.get(c.s) is None else int(iterations[c.s]),
            }
            for c in model.candidates
        ]
        return {
            "n": int(data.n),
            "tau_grid_size": int(grid.size),
            "cv_grid_size": int(cv_grid.size),
            "cv_value": None if selected is None else float(selected.cv_value),
            "weights_converged": True if selected is None else bool(selected.converged),
            "vertex_cv": None if selected is None else [float(v) for v in selected.vertex_values],
            "crossing_rate": crossing_diagnostic(model, data, grid),
            "candidates": candidates,
        }
