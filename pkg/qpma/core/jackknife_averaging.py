"""
Jackknife (leave-one-out) weight selection over the probability simplex.

The cross-validation criterion averages the check loss of the weighted
leave-one-out predictions over observations and a tau grid. It is convex and
piecewise linear in the weights. The optimiser first runs projected
subgradient steps, then polishes with SLSQP on a sequence of smoothed
criteria, and finally returns whichever feasible point (including every
vertex and the uniform vector) has the smallest exact criterion.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from ..errors import ConfigError, DataError, NumericalError
from ..utils.parallel import parallel_map
from .candidate_models import (
    CandidateModel,
    Dataset,
    build_design,
    candidate_indices,
    linear_columns_for,
)
from .iqr_solver import FitConfig, FitResult, check_loss, fit, fit_loo, smoothed_check_derivative, smoothed_check_loss
from .spline_basis import SplineSpec
from .tau_basis import TauBasis, check_tau

logger = logging.getLogger(__name__)

SIMPLEX_TOLERANCE = 1e-10


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {w >= 0, sum(w) = 1} (sort-based)."""
    v = np.asarray(v, dtype=float).ravel()
    u = np.sort(v)[::-1]
    cssv = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    rho = np.count_nonzero(u - cssv / ind > 0)
    shift = cssv[rho - 1] / rho
    w = np.maximum(v - shift, 0.0)
    return w / w.sum()


@dataclass(frozen=True)
class WeightVector:
    """Model weights on the probability simplex."""

    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float).ravel()
        if w.size == 0 or not np.all(np.isfinite(w)):
            raise DataError("weight vector must be non-empty and finite")
        # validated only, never renormalised
        if np.any(w < 0) or abs(w.sum() - 1.0) > SIMPLEX_TOLERANCE:
            raise DataError(f"weights {w.tolist()} are not on the simplex")
        object.__setattr__(self, "w", w)

    def __len__(self) -> int:
        return self.w.size

    @classmethod
    def uniform(cls, p: int) -> "WeightVector":
        return cls(np.full(p, 1.0 / p))

    @classmethod
    def vertex(cls, p: int, s: int) -> "WeightVector":
        if not 0 <= s < p:
            raise DataError(f"sub-model index {s} out of range for {p} candidates")
        w = np.zeros(p)
        w[s] = 1.0
        return cls(w)


@dataclass(frozen=True)
class LooPredictions:
    """P[i, k, s]: prediction for row i at tau_k from candidate s fitted without row i."""

    P: np.ndarray
    y: np.ndarray
    grid: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        y = np.asarray(self.y, dtype=float).ravel()
        grid = check_tau(np.atleast_1d(np.asarray(self.grid, dtype=float)))
        if P.ndim != 3 or P.shape[:2] != (y.size, grid.size):
            raise DataError(f"prediction tensor shape {P.shape} does not match n={y.size}, m={grid.size}")
        if not np.all(np.isfinite(P)):
            raise NumericalError("leave-one-out predictions contain non-finite values")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "grid", grid)

    @property
    def n_candidates(self) -> int:
        return self.P.shape[2]

    def residuals(self, w: np.ndarray) -> np.ndarray:
        return self.y[:, None] - self.P @ w


@dataclass
class WeightConfig:
    """Settings for the weight optimiser and the CV tau grid."""

    thin: int = 1
    subgradient_iters: int = 300
    polish_stages: int = 4
    polish_iters: int = 200
    tol: float = 1e-12

    def __post_init__(self):
        if self.thin < 1:
            raise ConfigError(f"weights.thin must be >= 1, got {self.thin}")
        if self.subgradient_iters < 0 or self.polish_stages < 0 or self.polish_iters < 1:
            raise ConfigError("weights iteration counts must be non-negative")
        if not self.tol > 0:
            raise ConfigError(f"weights.tol must be > 0, got {self.tol}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "thin": self.thin,
            "subgradient_iters": self.subgradient_iters,
            "polish_stages": self.polish_stages,
            "polish_iters": self.polish_iters,
            "tol": self.tol,
        }


@dataclass
class WeightResult:
    weights: WeightVector
    cv_value: float
    converged: bool
    vertex_values: np.ndarray = field(repr=False)


@dataclass
class AveragedModel:
    """Candidate sub-models combined with simplex weights."""

    candidates: List[CandidateModel]
    weights: WeightVector
    column_names: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.candidates:
            raise DataError("an averaged model needs at least one candidate")
        if len(self.weights) != len(self.candidates):
            raise DataError(f"{len(self.weights)} weights for {len(self.candidates)} candidates")
        basis = self.candidates[0].tau_basis
        width = len(self.candidates[0].linear_columns) + 1
        for candidate in self.candidates[1:]:
            if candidate.tau_basis != basis or len(candidate.linear_columns) + 1 != width:
                raise DataError("candidates must share the tau basis and covariate layout")
        if not self.column_names:
            self.column_names = self.candidates[0].column_names

    @property
    def tau_basis(self) -> TauBasis:
        return self.candidates[0].tau_basis

    def predict_matrix(self, x: np.ndarray, grid: Sequence[float]) -> np.ndarray:
        """Weighted quantile predictions, shape (rows, len(grid))."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.column_names and x.shape[1] != len(self.column_names):
            raise DataError(f"rows have {x.shape[1]} covariates, model expects {len(self.column_names)}")
        total = np.zeros((x.shape[0], np.atleast_1d(grid).size))
        for w, candidate in zip(self.weights.w, self.candidates):
            if w > 0:
                total += w * candidate.predict_matrix(x, grid)
        return total

    def __call__(self, x: np.ndarray, grid: Sequence[float]) -> np.ndarray:
        return self.predict_matrix(x, grid)


def averaged_predict(model: AveragedModel, x_row: Sequence[float], tau: float) -> float:
    """sum_s w_s mu_s(x, tau) for one row."""
    check_tau(tau)
    return float(model.predict_matrix(np.asarray(x_row, dtype=float).reshape(1, -1), [tau])[0, 0])


def cv_criterion(w, loo: LooPredictions) -> float:
    """Grid-average check loss of the weighted leave-one-out predictions."""
    weights = w.w if isinstance(w, WeightVector) else np.asarray(w, dtype=float)
    if weights.size != loo.n_candidates:
        raise DataError(f"{weights.size} weights for {loo.n_candidates} candidates")
    return float(np.mean(check_loss(loo.grid[None, :], loo.residuals(weights))))


def _smoothed_cv(w: np.ndarray, loo: LooPredictions, h: float):
    r = loo.residuals(w)
    taus = loo.grid[None, :]
    value = float(np.mean(smoothed_check_loss(taus, r, h)))
    psi = smoothed_check_derivative(taus, r, h)
    grad = -np.einsum("ik,iks->s", psi, loo.P) / psi.size
    return value, grad


def _subgradient(w: np.ndarray, loo: LooPredictions) -> np.ndarray:
    r = loo.residuals(w)
    psi = loo.grid[None, :] - (r < 0)
    return -np.einsum("ik,iks->s", psi, loo.P) / psi.size


def optimize_weights(loo: LooPredictions, opt_cfg: Optional[WeightConfig] = None) -> WeightResult:
    """Minimise the CV criterion over the simplex."""
    opt_cfg = opt_cfg or WeightConfig()
    p = loo.n_candidates
    vertices = np.array([cv_criterion(WeightVector.vertex(p, s), loo) for s in range(p)])
    if p == 1:
        return WeightResult(WeightVector(np.ones(1)), float(vertices[0]), True, vertices)

    candidates = [np.eye(p)[s] for s in range(p)] + [np.full(p, 1.0 / p)]
    values = list(vertices) + [cv_criterion(candidates[-1], loo)]
    start = candidates[int(np.argmin(values))]

    # projected subgradient with diminishing steps
    w, best_w, best_value = start.copy(), start.copy(), min(values)
    for t in range(opt_cfg.subgradient_iters):
        g = _subgradient(w, loo)
        norm = np.linalg.norm(g)
        if norm == 0:
            break
        w = project_simplex(w - 0.5 / np.sqrt(t + 1.0) * g / norm)
        value = cv_criterion(w, loo)
        if value < best_value:
            best_w, best_value = w.copy(), value

    # smoothed SLSQP polish with continuation on the smoothing scale
    scale = float(np.mean(np.abs(loo.residuals(best_w)))) or 1.0
    converged = True
    w = best_w.copy()
    for stage in range(1, opt_cfg.polish_stages + 1):
        h = scale * 10.0 ** (-stage)
        result = minimize(
            _smoothed_cv, w, args=(loo, h), jac=True, method="SLSQP",
            bounds=[(0.0, 1.0)] * p,
            constraints=[{"type": "eq", "fun": lambda v: np.sum(v) - 1.0, "jac": lambda v: np.ones_like(v)}],
            options={"maxiter": opt_cfg.polish_iters, "ftol": opt_cfg.tol},
        )
        converged = bool(result.success)
        w = project_simplex(result.x)
        value = cv_criterion(w, loo)
        if value < best_value:
            best_w, best_value = w.copy(), value

    if not converged:
        logger.warning("weight polish did not converge; returning best feasible weights")
    return WeightResult(WeightVector(best_w), float(best_value), converged, vertices)


@dataclass
class CandidateFits:
    """Full-sample fits and designs for every candidate, keyed by covariate index."""

    designs: Dict[int, np.ndarray]
    fits: Dict[int, FitResult]
    specs: Dict[int, SplineSpec]


def fit_candidates(data: Dataset, specs: Dict[int, SplineSpec], basis: TauBasis,
                   cfg: FitConfig, workers: int = 1) -> CandidateFits:
    """Full-sample fit of every partially linear sub-model."""
    order = candidate_indices(data)
    if not order:
        raise DataError("no continuous covariate available for the nonparametric component")
    designs = {s: build_design(data, s, specs[s]) for s in order}

    def run(s: int) -> FitResult:
        try:
            return fit(designs[s], data.y, basis, cfg)
        except (DataError, NumericalError) as exc:
            raise type(exc)(f"sub-model {s + 1}: {exc}") from exc

    results = parallel_map(run, order, workers)
    return CandidateFits(designs=designs, fits=dict(zip(order, results)), specs=dict(specs))


def build_candidates(data: Dataset, fits: CandidateFits, basis: TauBasis) -> List[CandidateModel]:
    return [
        CandidateModel(
            s=s,
            spline=fits.specs[s],
            tau_basis=basis,
            theta=fits.fits[s].theta,
            linear_columns=linear_columns_for(data, s),
            column_names=data.column_names,
            converged=fits.fits[s].converged,
            objective=fits.fits[s].objective,
        )
        for s in sorted(fits.fits)
    ]


def loo_tensor(designs: Sequence[np.ndarray], y: np.ndarray, basis: TauBasis, cfg: FitConfig,
               grid: Sequence[float], full_fits: Optional[Sequence[FitResult]] = None,
               workers: int = 1, labels: Optional[Sequence[int]] = None) -> LooPredictions:
    """Leave-one-out prediction tensor for precomputed candidate designs."""
    y = np.asarray(y, dtype=float).ravel()
    n = y.size
    if n < 2:
        raise DataError("leave-one-out needs at least two observations")
    if not designs:
        raise DataError("no candidate designs given")
    grid = check_tau(np.atleast_1d(np.asarray(grid, dtype=float)))
    basis_grid = basis.matrix(grid)
    labels = list(labels) if labels is not None else list(range(len(designs)))
    if full_fits is None:
        full_fits = [fit(design, y, basis, cfg) for design in designs]

    loo_cfgs = [
        replace(cfg, grid_size=cfg.grid_size or n, warm_start=full.theta,
                smoothing=full.smoothing, continuation=0, budget_log_level=logging.DEBUG)
        for full in full_fits
    ]

    def cell(job: Tuple[int, int]) -> Tuple[np.ndarray, bool]:
        c, i = job
        try:
            result = fit_loo(designs[c], y, basis, loo_cfgs[c], i)
        except (DataError, NumericalError) as exc:
            raise type(exc)(f"sub-model {labels[c] + 1}, left-out row {i + 1}: {exc}") from exc
        return designs[c][i] @ result.theta @ basis_grid.T, result.converged

    jobs = [(c, i) for c in range(len(designs)) for i in range(n)]
    rows = parallel_map(cell, jobs, workers)
    P = np.empty((n, grid.size, len(designs)))
    for (c, i), (row, _) in zip(jobs, rows):
        P[i, :, c] = row
    capped = sum(1 for _, converged in rows if not converged)
    if capped:
        logger.warning(f"{capped} of {len(jobs)} leave-one-out refits stopped at "
                       f"loo_max_iters={cfg.loo_max_iters}; using their best iterates")
    return LooPredictions(P=P, y=y, grid=grid)


def loo_predictions(data: Dataset, specs: Dict[int, SplineSpec], basis: TauBasis,
                    cfg: FitConfig, grid: Sequence[float],
                    fits: Optional[CandidateFits] = None, workers: int = 1) -> LooPredictions:
    """Leave-one-out tensor for every candidate of ``data``.

    Knots come from ``specs`` (built on the full column) and are reused in
    every fold.
    """
    if data.n < 2:
        raise DataError("leave-one-out needs at least two observations")
    if fits is None:
        fits = fit_candidates(data, specs, basis, cfg, workers)
    order = sorted(fits.fits)
    return loo_tensor(
        [fits.designs[s] for s in order], data.y, basis, cfg, grid,
        full_fits=[fits.fits[s] for s in order], workers=workers, labels=order,
    )
