"""
Normalized B-spline bases with equally spaced interior knots.

The basis is the clamped (boundary knots repeated ``order`` times) B-spline
family of the given order, which forms a partition of unity on
``[lower, upper]``. Evaluation points outside the domain are clamped to it.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence

import numpy as np
from scipy.interpolate import BSpline

from ..errors import ConfigError, DataError

DEFAULT_ORDER = 2


def default_interior_knots(n: int) -> int:
    """Largest integer not greater than n^(1/5)."""
    if n < 1:
        raise ConfigError("sample size must be positive to choose a knot count")
    count = int(np.floor(n ** 0.2))
    # guard against floating point landing just below an exact integer root
    if (count + 1) ** 5 <= n:
        count += 1
    return count


@dataclass(frozen=True)
class SplineSpec:
    """Knot sequence, order and domain of a univariate B-spline basis."""

    order: int
    n_interior: int
    lower: float
    upper: float
    knots: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        if self.order < 2:
            raise ConfigError(f"spline order must be >= 2, got {self.order}")
        if self.n_interior < 0:
            raise ConfigError(f"number of interior knots must be >= 0, got {self.n_interior}")
        if not self.lower < self.upper:
            raise DataError("constant covariate cannot be the nonparametric component")
        knots = np.asarray(self.knots, dtype=float)
        if knots.shape != (self.n_interior + 2 * self.order,):
            raise ConfigError("knot vector length must equal n_interior + 2 * order")
        knots.setflags(write=False)
        object.__setattr__(self, "knots", knots)

    @property
    def degree(self) -> int:
        return self.order - 1

    @property
    def dimension(self) -> int:
        """Basis dimension J_n = N_n + d."""
        return self.n_interior + self.order

    def evaluate(self, x) -> np.ndarray:
        """Basis matrix of shape (len(x), J_n); a scalar gives a vector."""
        return eval_basis(self, x)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "order": self.order,
            "n_interior": self.n_interior,
            "lower": float(self.lower),
            "upper": float(self.upper),
            "knots": [float(k) for k in self.knots],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SplineSpec":
        return cls(
            order=int(data["order"]),
            n_interior=int(data["n_interior"]),
            lower=float(data["lower"]),
            upper=float(data["upper"]),
            knots=np.asarray(data["knots"], dtype=float),
        )


def make_spec(x_values: Sequence[float], n_interior: Optional[int] = None,
              order: int = DEFAULT_ORDER) -> SplineSpec:
    """Build a clamped spline basis on the range of ``x_values``.

    ``n_interior`` defaults to floor(n^(1/5)) with n the number of values.
    """
    x = np.asarray(x_values, dtype=float).ravel()
    if x.size == 0:
        raise DataError("cannot build a spline basis from an empty column")
    if n_interior is None:
        n_interior = default_interior_knots(x.size)
    lower, upper = float(np.min(x)), float(np.max(x))
    if not lower < upper:
        raise DataError("constant covariate cannot be the nonparametric component")
    if order < 2:
        raise ConfigError(f"spline order must be >= 2, got {order}")
    if n_interior < 0:
        raise ConfigError(f"number of interior knots must be >= 0, got {n_interior}")

    interior = np.linspace(lower, upper, n_interior + 2)[1:-1]
    knots = np.concatenate([
        np.full(order, lower),
        interior,
        np.full(order, upper),
    ])
    return SplineSpec(order=order, n_interior=n_interior, lower=lower,
                      upper=upper, knots=knots)


def eval_basis(spec: SplineSpec, x) -> np.ndarray:
    """Evaluate every basis function at ``x`` (clamped to the domain)."""
    scalar = np.ndim(x) == 0
    points = np.clip(np.atleast_1d(np.asarray(x, dtype=float)), spec.lower, spec.upper)
    matrix = BSpline.design_matrix(points, spec.knots, spec.degree).toarray()
    return matrix[0] if scalar else matrix
