"""
Partially linear candidate sub-models.

Sub-model ``s`` puts continuous covariate ``s`` through a B-spline expansion
and keeps every other covariate linear:

    z_i = (B(x_is), x_i without column s)

Its tau-varying coefficients are ``theta @ b(tau)`` where ``theta`` has one row
per design column and one column per tau-basis function. The spline block
sums to one, so it carries the intercept and no separate constant column is
ever added.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import DataError
from .spline_basis import SplineSpec, eval_basis, make_spec
from .tau_basis import TauBasis, check_tau


class ColumnKind(str, Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


@dataclass(frozen=True)
class Dataset:
    """Response vector plus covariates, continuous columns first."""

    y: np.ndarray
    x: np.ndarray
    column_kind: Tuple[ColumnKind, ...]
    column_names: Tuple[str, ...] = ()

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).ravel()
        x = np.asarray(self.x, dtype=float)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        if x.shape[0] != y.shape[0]:
            raise DataError(f"response has {y.shape[0]} rows but covariates have {x.shape[0]}")
        if y.shape[0] < 1:
            raise DataError("dataset has no rows")
        kinds = tuple(ColumnKind(k) for k in self.column_kind)
        if len(kinds) != x.shape[1]:
            raise DataError(f"{len(kinds)} column kinds given for {x.shape[1]} covariates")
        seen_discrete = False
        for kind in kinds:
            if kind is ColumnKind.DISCRETE:
                seen_discrete = True
            elif seen_discrete:
                raise DataError("continuous covariates must precede discrete ones")
        names = tuple(self.column_names) or tuple(f"x{j + 1}" for j in range(x.shape[1]))
        if len(names) != x.shape[1]:
            raise DataError(f"{len(names)} column names given for {x.shape[1]} covariates")
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x))):
            raise DataError("dataset contains missing or non-finite values")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "column_kind", kinds)
        object.__setattr__(self, "column_names", names)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        """Number of continuous covariates."""
        return sum(kind is ColumnKind.CONTINUOUS for kind in self.column_kind)

    @property
    def q(self) -> int:
        """Number of discrete covariates."""
        return len(self.column_kind) - self.p

    def check_trainable(self) -> None:
        """Raise DataError unless the data can train a model."""
        if self.n < 2:
            raise DataError(f"training needs at least two observations, got {self.n}")
        flat = [name for j, (kind, name) in enumerate(zip(self.column_kind, self.column_names))
                if kind is ColumnKind.CONTINUOUS and np.ptp(self.x[:, j]) == 0]
        if flat:
            raise DataError(f"continuous covariate(s) {flat} are constant; declare them discrete or drop them")

    def drop_row(self, i: int) -> "Dataset":
        keep = np.arange(self.n) != i
        return Dataset(self.y[keep], self.x[keep], self.column_kind, self.column_names)


@dataclass(frozen=True)
class CandidateModel:
    """One fitted partially linear sub-model."""

    s: int
    spline: SplineSpec
    tau_basis: TauBasis
    theta: np.ndarray
    linear_columns: Tuple[int, ...]
    column_names: Tuple[str, ...] = ()
    converged: bool = True
    objective: float = float("nan")

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        expected = (self.spline.dimension + len(self.linear_columns), self.tau_basis.size)
        if theta.shape != expected:
            raise DataError(f"theta has shape {theta.shape}, expected {expected}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "linear_columns", tuple(int(c) for c in self.linear_columns))

    @property
    def width(self) -> int:
        return self.theta.shape[0]

    @property
    def name(self) -> str:
        label = self.column_names[self.s] if self.column_names else f"x{self.s + 1}"
        return f"M{self.s + 1}({label})"

    def design(self, x: np.ndarray) -> np.ndarray:
        """Design rows for a covariate matrix laid out like the training data."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        needed = max((self.s,) + self.linear_columns) + 1
        if x.shape[1] < needed:
            raise DataError(f"covariate rows have {x.shape[1]} entries, model needs {needed}")
        return np.hstack([eval_basis(self.spline, x[:, self.s]), x[:, list(self.linear_columns)]])

    def coefficients(self, tau: float) -> Dict[str, Any]:
        """xi(tau) = theta b(tau), split into spline and linear blocks."""
        xi = self.theta @ self.tau_basis.eval(tau)
        j = self.spline.dimension
        names = self.column_names or tuple(f"x{c + 1}" for c in range(max(self.linear_columns + (self.s,)) + 1))
        return {
            "gamma": xi[:j],
            "beta": {names[c]: float(b) for c, b in zip(self.linear_columns, xi[j:])},
        }

    def predict_matrix(self, x: np.ndarray, grid: Sequence[float]) -> np.ndarray:
        """Quantile predictions of shape (rows, len(grid))."""
        return self.design(x) @ self.theta @ self.tau_basis.matrix(grid).T

    def to_dict(self) -> Dict[str, Any]:
        return {
            "s": self.s,
            "spline": self.spline.to_dict(),
            "linear_columns": list(self.linear_columns),
            "theta": [[float(v) for v in row] for row in self.theta],
            "converged": bool(self.converged),
            "objective": float(self.objective),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], tau_basis: TauBasis,
                  column_names: Sequence[str] = ()) -> "CandidateModel":
        return cls(
            s=int(data["s"]),
            spline=SplineSpec.from_dict(data["spline"]),
            tau_basis=tau_basis,
            theta=np.asarray(data["theta"], dtype=float).reshape(-1, tau_basis.size),
            linear_columns=tuple(data["linear_columns"]),
            column_names=tuple(column_names),
            converged=bool(data.get("converged", True)),
            objective=float(data.get("objective", float("nan"))),
        )


def linear_columns_for(data: Dataset, s: int) -> Tuple[int, ...]:
    return tuple(j for j in range(data.x.shape[1]) if j != s)


def build_design(data: Dataset, s: int, spline: SplineSpec) -> np.ndarray:
    """Design matrix n x (J_n + p + q - 1) for sub-model ``s`` (0-based)."""
    if not 0 <= s < data.x.shape[1]:
        raise DataError(f"covariate index {s} out of range for {data.x.shape[1]} covariates")
    if data.column_kind[s] is not ColumnKind.CONTINUOUS:
        raise DataError("nonparametric component must be continuous")
    linear = list(linear_columns_for(data, s))
    return np.hstack([eval_basis(spline, data.x[:, s]), data.x[:, linear]])


def regression_vector(z: Sequence[float], tau: float, basis: TauBasis) -> np.ndarray:
    """D(tau) = b(tau) kron z, so that z' theta b(tau) = D(tau)' vec(theta)."""
    return np.kron(basis.eval(tau), np.asarray(z, dtype=float))


def vec(theta: np.ndarray) -> np.ndarray:
    """Stack the columns of ``theta``."""
    return np.asarray(theta, dtype=float).reshape(-1, order="F")


def unvec(values: np.ndarray, rows: int) -> np.ndarray:
    return np.asarray(values, dtype=float).reshape(rows, -1, order="F")


def predict_quantile(model: CandidateModel, x_row: Sequence[float], tau: float) -> float:
    """B(x_s)' gamma(tau) + x_{-s}' beta(tau) for a single row."""
    row = np.asarray(x_row, dtype=float).ravel()
    if model.column_names and row.shape[0] != len(model.column_names):
        raise DataError(f"row has {row.shape[0]} covariates, model expects {len(model.column_names)}")
    check_tau(tau)
    z = model.design(row.reshape(1, -1))[0]
    return float(regression_vector(z, tau, model.tau_basis) @ vec(model.theta))


def candidate_indices(data: Dataset) -> List[int]:
    """Indices of covariates that may be the nonparametric component."""
    return [j for j, kind in enumerate(data.column_kind) if kind is ColumnKind.CONTINUOUS]


def fit_specs(data: Dataset, n_interior: Optional[int] = None,
              order: int = 2) -> Dict[int, SplineSpec]:
    """One spline spec per continuous covariate, built on the full column."""
    data.check_trainable()
    return {s: make_spec(data.x[:, s], n_interior, order) for s in candidate_indices(data)}
