"""
Integrated quantile check-loss estimation.

For a design ``Z`` (n x P) and tau-basis ``b`` the coefficient matrix
``theta`` (P x K) is chosen to minimise

    (1/m) sum_k (1/n) sum_i rho_{tau_k}(y_i - z_i' theta b(tau_k))

over an equally spaced interior tau grid. The objective is convex and
piecewise linear, so it is minimised through its Moreau envelope with scale
``h`` using L-BFGS; ``h`` is halved a few times with warm restarts so the
smoothing bias shrinks along the way. Design columns are RMS-scaled before
the search and theta is mapped back afterwards.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from ..errors import CollinearDesignError, ConfigError, DataError
from .candidate_models import unvec, vec
from .tau_basis import TauBasis, check_tau, tau_grid

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-10
MAD_SCALE = 1.4826
# last continuation stage stops on a much tighter rule than the warm-up stages
FINAL_FTOL_FACTOR = 1e-4
FINAL_GTOL = 1e-12
# a later stage is kept unless an earlier one is better by more than this relative margin
STAGE_SLACK = 1e-9


@dataclass
class FitConfig:
    """Solver settings shared by every sub-model fit."""

    grid_size: Optional[int] = None
    smoothing: Optional[float] = None
    max_iters: int = 500
    tol: float = 1e-9
    continuation: int = 2
    loo_max_iters: int = 50
    warm_start: Optional[np.ndarray] = field(default=None, repr=False)
    budget_log_level: int = field(default=logging.WARNING, repr=False)

    def __post_init__(self):
        if self.grid_size is not None and self.grid_size < 1:
            raise ConfigError(f"fit.grid_size must be >= 1, got {self.grid_size}")
        if self.smoothing is not None and not self.smoothing > 0:
            raise ConfigError(f"fit.smoothing must be > 0, got {self.smoothing}")
        if not self.tol > 0:
            raise ConfigError(f"fit.tol must be > 0, got {self.tol}")
        if self.max_iters < 1 or self.loo_max_iters < 1:
            raise ConfigError("fit.max_iters and fit.loo_max_iters must be >= 1")
        if self.continuation < 0:
            raise ConfigError(f"fit.continuation must be >= 0, got {self.continuation}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "grid_size": self.grid_size,
            "smoothing": self.smoothing,
            "max_iters": self.max_iters,
            "tol": self.tol,
            "continuation": self.continuation,
            "loo_max_iters": self.loo_max_iters,
        }


@dataclass
class FitResult:
    theta: np.ndarray
    converged: bool
    objective: float
    smoothed_objective: float
    smoothing: float
    n_iter: int
    history: List[float] = field(default_factory=list, repr=False)


@dataclass(frozen=True)
class CheckLoss:
    """rho_tau(u) = u (tau - 1{u < 0})."""

    tau: float

    def __post_init__(self):
        check_tau(self.tau)

    def __call__(self, u):
        return check_loss(self.tau, u)

    def smoothed(self, u, h: float):
        return smoothed_check_loss(self.tau, u, h)


def check_loss(tau, u):
    u = np.asarray(u, dtype=float)
    return u * (tau - (u < 0))


def smoothed_check_loss(tau, u, h: float):
    """Moreau envelope of rho_tau: quadratic on [(tau-1)h, tau h], linear outside."""
    u = np.asarray(u, dtype=float)
    tau = np.asarray(tau, dtype=float)
    upper = tau * h
    lower = (tau - 1.0) * h
    return np.where(
        u > upper, tau * u - 0.5 * tau * upper,
        np.where(u < lower, (tau - 1.0) * u - 0.5 * (tau - 1.0) * lower, 0.5 * u * u / h),
    )


def smoothed_check_derivative(tau, u, h: float):
    u = np.asarray(u, dtype=float)
    tau = np.asarray(tau, dtype=float)
    return np.clip(u / h, tau - 1.0, tau)


def integrated_loss(theta: np.ndarray, design: np.ndarray, y: np.ndarray,
                    basis: TauBasis, grid: Sequence[float]) -> float:
    """Grid average over tau of the mean check loss."""
    design, y = _check_dimensions(design, y)
    grid = check_tau(np.atleast_1d(np.asarray(grid, dtype=float)))
    theta = np.asarray(theta, dtype=float).reshape(design.shape[1], basis.size)
    fitted = design @ theta @ basis.matrix(grid).T
    return float(np.mean(check_loss(grid[None, :], y[:, None] - fitted)))


class SmoothedObjective:
    """Smoothed integrated loss and its gradient in vec(theta)."""

    def __init__(self, design: np.ndarray, y: np.ndarray, basis_matrix: np.ndarray,
                 grid: np.ndarray, h: float):
        self.design = design
        self.y = y
        self.basis_matrix = basis_matrix
        self.grid = grid
        self.h = h
        self.scale = 1.0 / (design.shape[0] * grid.shape[0])
        self._last = None

    def residuals(self, theta: np.ndarray) -> np.ndarray:
        return self.y[:, None] - (self.design @ theta) @ self.basis_matrix.T

    def value_and_grad(self, flat: np.ndarray):
        theta = unvec(flat, self.design.shape[1])
        r = self.residuals(theta)
        value = float(np.sum(smoothed_check_loss(self.grid[None, :], r, self.h)) * self.scale)
        psi = smoothed_check_derivative(self.grid[None, :], r, self.h)
        grad = -(self.design.T @ (psi @ self.basis_matrix)) * self.scale
        self._last = (flat.copy(), value)
        return value, vec(grad)

    def value(self, flat: np.ndarray) -> float:
        if self._last is not None and np.array_equal(self._last[0], flat):
            return self._last[1]
        return self.value_and_grad(flat)[0]


def default_smoothing(y: np.ndarray) -> float:
    """0.1 times the normal-consistent MAD of y, with fallbacks for flat data."""
    y = np.asarray(y, dtype=float)
    centre = np.median(y)
    spread = MAD_SCALE * np.median(np.abs(y - centre))
    if not spread > 0:
        spread = float(np.mean(np.abs(y - centre)))
    if not spread > 0:
        spread = 1e-5 * (1.0 + abs(centre))
    return 0.1 * spread


def check_rank(matrix: np.ndarray, what: str = "design") -> None:
    rows, cols = matrix.shape
    if cols == 0:
        raise DataError(f"{what} has no columns")
    singular = np.linalg.svd(matrix, compute_uv=False)
    if rows < cols or singular[-1] < RANK_TOLERANCE * singular[0]:
        if what == "design":
            raise CollinearDesignError("collinear design (did you add an intercept?)")
        raise CollinearDesignError(f"{what} is rank deficient")


def initial_theta(design: np.ndarray, y: np.ndarray, basis_matrix: np.ndarray) -> np.ndarray:
    """Least-squares fit carried by the tau-constant direction of the basis."""
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    constant, *_ = np.linalg.lstsq(basis_matrix, np.ones(basis_matrix.shape[0]), rcond=None)
    return np.outer(beta, constant)


def column_scales(design: np.ndarray) -> np.ndarray:
    """Root-mean-square of each design column."""
    return np.sqrt(np.mean(design * design, axis=0))


def fit(design: np.ndarray, y: np.ndarray, basis: TauBasis, cfg: Optional[FitConfig] = None,
        grid: Optional[Sequence[float]] = None) -> FitResult:
    """Minimise the integrated check loss for one design.

    ``grid`` defaults to ``tau_grid(cfg.grid_size or n)``. The solver works on
    RMS-scaled columns and maps theta back, so rescaling a column of
    ``design`` rescales the matching row of theta and leaves fitted values
    unchanged.
    """
    cfg = cfg or FitConfig()
    design, y = _check_dimensions(design, y)
    if grid is None:
        grid = tau_grid(cfg.grid_size or y.shape[0])
    grid = check_tau(np.atleast_1d(np.asarray(grid, dtype=float)))
    basis_matrix = basis.matrix(grid)
    check_rank(design)
    check_rank(basis_matrix, "tau basis on the grid")

    scales = column_scales(design)
    scaled = design / scales
    n_params = design.shape[1]
    if cfg.warm_start is not None:
        theta = np.asarray(cfg.warm_start, dtype=float).reshape(n_params, basis.size) * scales[:, None]
    else:
        theta = initial_theta(scaled, y, basis_matrix)

    h0 = cfg.smoothing or default_smoothing(y)
    stages = [h0 / 2 ** j for j in range(cfg.continuation + 1)]

    best_theta, best_loss = theta, integrated_loss(theta, scaled, y, basis, grid)
    converged, n_iter, history, smoothed_value = False, 0, [], float("nan")
    for stage, h in enumerate(stages):
        objective = SmoothedObjective(scaled, y, basis_matrix, grid, h)
        stage_history = [objective.value(vec(theta))]
        final = stage == len(stages) - 1

        def record(xk, _objective=objective, _history=stage_history):
            _history.append(_objective.value(xk))

        result = minimize(
            objective.value_and_grad, vec(theta), jac=True, method="L-BFGS-B",
            callback=record,
            options={
                "maxiter": cfg.max_iters,
                "ftol": cfg.tol * FINAL_FTOL_FACTOR if final else cfg.tol,
                "gtol": FINAL_GTOL if final else 1e-8,
                "maxcor": 20,
            },
        )
        theta = unvec(result.x, n_params)
        n_iter += int(result.nit)
        history = stage_history
        smoothed_value = float(result.fun)
        # status 1 means the iteration budget ran out; anything else is a stationary stop
        converged = bool(result.status != 1 and np.isfinite(result.fun))
        loss = integrated_loss(theta, scaled, y, basis, grid)
        if loss <= best_loss * (1.0 + STAGE_SLACK):
            best_theta, best_loss = theta, loss
        logger.debug(f"smoothing h={h:.3g}: {result.nit} iterations, loss={loss:.6g}, status={result.status}")

    if not converged:
        logger.log(cfg.budget_log_level, f"solver hit max_iters={cfg.max_iters} before converging; "
                                          "returning best iterate")
    return FitResult(
        theta=best_theta / scales[:, None],
        converged=converged,
        objective=best_loss,
        smoothed_objective=smoothed_value,
        smoothing=stages[-1],
        n_iter=n_iter,
        history=history,
    )


def fit_loo(design: np.ndarray, y: np.ndarray, basis: TauBasis, cfg: Optional[FitConfig],
            i: int) -> FitResult:
    """Refit without row ``i`` on the full-sample tau grid.

    A warm start in ``cfg`` caps the iterations at ``cfg.loo_max_iters``.
    """
    cfg = cfg or FitConfig()
    design, y = _check_dimensions(design, y)
    n = y.shape[0]
    if n < 2:
        raise DataError("leave-one-out needs at least two observations")
    if not 0 <= i < n:
        raise DataError(f"row index {i} out of range for {n} observations")
    keep = np.arange(n) != i
    loo_cfg = replace(
        cfg,
        grid_size=cfg.grid_size or n,
        max_iters=cfg.loo_max_iters if cfg.warm_start is not None else cfg.max_iters,
    )
    return fit(design[keep], y[keep], basis, loo_cfg)


def _check_dimensions(design, y):
    design = np.asarray(design, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if design.ndim != 2:
        raise DataError(f"design must be a matrix, got {design.ndim} dimensions")
    if design.shape[0] != y.shape[0]:
        raise DataError(f"design has {design.shape[0]} rows but response has {y.shape[0]}")
    return design, y
