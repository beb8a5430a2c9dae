"""
Reference quantile predictors sharing the evaluation harness.

``qlrm`` fits an ordinary linear quantile regression at every grid level,
``qrcm`` a linear model whose coefficients follow the tau basis, ``ew`` and
``qpl`` reuse the partially linear candidates with equal weights or a single
randomly chosen sub-model.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from ..errors import DataError
from ..utils.parallel import parallel_map
from .candidate_models import CandidateModel, Dataset
from .iqr_solver import FitConfig, FitResult, fit
from .jackknife_averaging import AveragedModel, WeightVector
from .tau_basis import TauBasis, check_tau

logger = logging.getLogger(__name__)


def linear_design(x: np.ndarray) -> np.ndarray:
    """Intercept followed by every covariate."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    return np.hstack([np.ones((x.shape[0], 1)), x])


@dataclass(frozen=True)
class QlrmModel:
    """Separate linear quantile fits, one per grid level."""

    grid: np.ndarray
    coefficients: np.ndarray
    converged: bool = True

    def coefficients_at(self, tau: float) -> np.ndarray:
        """Coefficients of the nearest fitted level."""
        return self.coefficients[int(np.argmin(np.abs(self.grid - tau)))]

    def predict_matrix(self, x: np.ndarray, grid: Sequence[float]) -> np.ndarray:
        grid = check_tau(np.atleast_1d(np.asarray(grid, dtype=float)))
        nearest = np.argmin(np.abs(self.grid[None, :] - grid[:, None]), axis=1)
        return linear_design(x) @ self.coefficients[nearest].T

    def __call__(self, x, grid):
        return self.predict_matrix(x, grid)


@dataclass(frozen=True)
class LinearQrcmModel:
    """Linear model with coefficients theta @ b(tau)."""

    theta: np.ndarray
    tau_basis: TauBasis
    converged: bool = True

    def predict_matrix(self, x: np.ndarray, grid: Sequence[float]) -> np.ndarray:
        return linear_design(x) @ self.theta @ self.tau_basis.matrix(grid).T

    def __call__(self, x, grid):
        return self.predict_matrix(x, grid)


def fit_qlrm(data: Dataset, grid: Sequence[float], cfg: Optional[FitConfig] = None,
             workers: int = 1) -> QlrmModel:
    """Independent linear quantile regression at each tau of ``grid``."""
    cfg = cfg or FitConfig()
    grid = check_tau(np.atleast_1d(np.asarray(grid, dtype=float)))
    design = linear_design(data.x)
    constant = TauBasis.constant()

    def run(tau: float) -> FitResult:
        return fit(design, data.y, constant, cfg, grid=[tau])

    results = parallel_map(run, list(grid), workers)
    coefficients = np.vstack([r.theta[:, 0] for r in results])
    return QlrmModel(grid=grid, coefficients=coefficients,
                     converged=all(r.converged for r in results))


def fit_qrcm_linear(data: Dataset, basis: TauBasis, cfg: Optional[FitConfig] = None) -> LinearQrcmModel:
    """Integrated-loss fit on the intercept-plus-covariates design."""
    result = fit(linear_design(data.x), data.y, basis, cfg)
    return LinearQrcmModel(theta=result.theta, tau_basis=basis, converged=result.converged)


def equal_weight_model(candidates: List[CandidateModel]) -> AveragedModel:
    return AveragedModel(candidates=list(candidates), weights=WeightVector.uniform(len(candidates)))


def single_submodel(candidates: List[CandidateModel], s: Optional[int] = None,
                    rng: Optional[np.random.Generator] = None) -> AveragedModel:
    """All weight on sub-model ``s`` (0-based), drawn uniformly from ``rng`` when omitted."""
    p = len(candidates)
    if s is None:
        if rng is None:
            raise DataError("single_submodel needs either an index or a random generator")
        s = int(rng.integers(p))
    if not 0 <= s < p:
        raise DataError(f"sub-model index {s} out of range for {p} candidates")
    return AveragedModel(candidates=list(candidates), weights=WeightVector.vertex(p, s))
