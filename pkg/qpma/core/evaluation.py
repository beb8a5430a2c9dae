"""
Out-of-sample quantile prediction error and cross-method comparison measures.

A quantile predictor is any callable ``predict(x, grid) -> (rows, len(grid))``.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from ..errors import DataError
from .candidate_models import Dataset
from .iqr_solver import check_loss
from .tau_basis import check_tau

logger = logging.getLogger(__name__)

QuantilePredictor = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class MethodResult:
    """OAQPE of one method in every replication."""

    method_name: str
    oaqpe_by_rep: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.oaqpe_by_rep, dtype=float).ravel()
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise DataError(f"OAQPE values of '{self.method_name}' must be finite and non-negative")
        object.__setattr__(self, "oaqpe_by_rep", values)

    @property
    def reps(self) -> int:
        return self.oaqpe_by_rep.size


@dataclass(frozen=True)
class ComparisonRow:
    method: str
    average_oaqpe: float
    sd_oaqpe: float
    winning_ratio: float
    loss_to_reference: Optional[float]


def _predictions(predict: QuantilePredictor, test: Dataset, grid: np.ndarray) -> np.ndarray:
    values = np.asarray(predict(test.x, grid), dtype=float)
    if values.shape != (test.n, grid.size):
        raise DataError(f"predictor returned shape {values.shape}, expected {(test.n, grid.size)}")
    return values


def oaqpe(predict: QuantilePredictor, test: Dataset, grid: Sequence[float]) -> float:
    """sum_k sum_i rho_{tau_k}(y_i - mu(x_i, tau_k)) / (m |I|) with m the grid length.

    ``grid`` is the training grid, ``tau_grid(n_train)``, not one sized by the test set.
    """
    grid = check_tau(np.atleast_1d(np.asarray(grid, dtype=float)))
    residuals = test.y[:, None] - _predictions(predict, test, grid)
    return float(np.sum(check_loss(grid[None, :], residuals)) / (grid.size * test.n))


def crossing_diagnostic(predict: QuantilePredictor, test: Dataset, grid: Sequence[float]) -> float:
    """Fraction of rows whose predicted quantiles decrease somewhere along the grid."""
    grid = check_tau(np.atleast_1d(np.asarray(grid, dtype=float)))
    if np.any(np.diff(grid) <= 0):
        raise DataError("crossing diagnostic needs an increasing tau grid")
    values = _predictions(predict, test, grid)
    crossed = np.any(np.diff(values, axis=1) < 0, axis=1)
    return float(np.mean(crossed))


def comparison_measures(results: Sequence[MethodResult], reference: str = "jqplma") -> List[ComparisonRow]:
    """Average OAQPE, winning ratio and loss-to-reference for every method.

    Wins and losses use strict inequalities, so ties count for nobody. The
    reference method's own loss entry is ``None``.
    """
    if not results:
        raise DataError("no method results to compare")
    reps = {r.reps for r in results}
    if len(reps) != 1:
        raise DataError(f"methods have different numbers of replications: {sorted(reps)}")
    names = [r.method_name for r in results]
    if len(set(names)) != len(names):
        raise DataError(f"duplicate method names in {names}")

    table = np.vstack([r.oaqpe_by_rep for r in results])
    by_name: Dict[str, np.ndarray] = dict(zip(names, table))
    if reference not in by_name:
        logger.warning(f"reference method '{reference}' not among {names}; loss column left empty")

    rows = []
    for idx, result in enumerate(results):
        values = table[idx]
        others = np.delete(table, idx, axis=0)
        wins = np.all(values[None, :] < others, axis=0) if others.size else np.ones_like(values, dtype=bool)
        if reference in by_name and result.method_name != reference:
            loss = float(np.mean(by_name[reference] < values))
        else:
            loss = None
        rows.append(ComparisonRow(
            method=result.method_name,
            average_oaqpe=float(np.mean(values)),
            sd_oaqpe=float(np.std(values, ddof=1)) if values.size > 1 else 0.0,
            winning_ratio=float(np.mean(wins)),
            loss_to_reference=loss,
        ))
    return rows
