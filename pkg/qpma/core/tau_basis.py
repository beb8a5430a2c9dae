"""
Known basis functions of the quantile level.

Each regression coefficient of a sub-model is a linear combination
``theta_row @ b(tau)`` of these functions.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Sequence, Tuple

import numpy as np
from scipy.special import ndtri

from ..errors import ConfigError, DataError

TauFunction = Callable[[np.ndarray], np.ndarray]

PRIMITIVES: Dict[str, TauFunction] = {
    "one": np.ones_like,
    "tau": lambda t: t,
    "tau2": lambda t: t ** 2,
    "tau3": lambda t: t ** 3,
    "qnorm": ndtri,
    "neglog1m": lambda t: -np.log1p(-t),
    "log": np.log,
    "logit": lambda t: np.log(t) - np.log1p(-t),
}


class TauFamily(str, Enum):
    GAUSSIAN = "gaussian"
    CUBIC_POLY = "cubic-poly"
    MIXED = "mixed"
    CUSTOM = "custom"


FAMILY_COMPONENTS: Dict[TauFamily, Tuple[str, ...]] = {
    TauFamily.GAUSSIAN: ("one", "qnorm"),
    TauFamily.CUBIC_POLY: ("one", "tau", "tau2", "tau3"),
    TauFamily.MIXED: ("one", "tau", "qnorm", "neglog1m"),
}

DEFAULT_FAMILY = TauFamily.GAUSSIAN


def check_tau(tau) -> np.ndarray:
    """Return ``tau`` as a float array, rejecting values outside (0, 1)."""
    values = np.asarray(tau, dtype=float)
    if not np.all((values > 0.0) & (values < 1.0)):
        raise DataError("quantile level outside open unit interval")
    return values


@dataclass(frozen=True)
class TauBasis:
    """A family of K named functions of tau."""

    family: TauFamily
    components: Tuple[str, ...]

    def __post_init__(self):
        if not self.components:
            raise ConfigError("a tau basis needs at least one component")
        unknown = [c for c in self.components if c not in PRIMITIVES]
        if unknown:
            raise ConfigError(
                f"unknown tau-basis components {unknown}; choose from {sorted(PRIMITIVES)}"
            )

    @property
    def size(self) -> int:
        """K, the number of component functions."""
        return len(self.components)

    @property
    def name(self) -> str:
        if self.family is TauFamily.CUSTOM:
            return "custom:" + ",".join(self.components)
        return self.family.value

    def eval(self, tau: float) -> np.ndarray:
        """b(tau) as a vector of length K."""
        return self.matrix(np.asarray([tau], dtype=float))[0]

    def matrix(self, grid: Sequence[float]) -> np.ndarray:
        """Basis evaluated on every grid point, shape (m, K)."""
        taus = check_tau(np.atleast_1d(np.asarray(grid, dtype=float)))
        return np.column_stack([PRIMITIVES[c](taus) for c in self.components])

    @classmethod
    def of(cls, family: TauFamily) -> "TauBasis":
        return cls(family=family, components=FAMILY_COMPONENTS[family])

    @classmethod
    def constant(cls) -> "TauBasis":
        """b(tau) = (1): coefficients that do not vary with tau."""
        return cls(family=TauFamily.CUSTOM, components=("one",))

    @classmethod
    def from_name(cls, name: str) -> "TauBasis":
        """Parse ``gaussian``, ``cubic-poly``, ``mixed`` or ``custom:a,b,...``."""
        text = (name or "").strip().lower()
        if text.startswith("custom:"):
            components = tuple(p.strip() for p in text.split(":", 1)[1].split(",") if p.strip())
            return cls(family=TauFamily.CUSTOM, components=components)
        try:
            family = TauFamily(text)
        except ValueError:
            raise ConfigError(
                f"unknown tau basis '{name}'; expected gaussian, cubic-poly, mixed or custom:<list>"
            ) from None
        if family is TauFamily.CUSTOM:
            raise ConfigError("custom tau basis needs a component list, e.g. custom:one,qnorm")
        return cls.of(family)


def tau_grid(n: int) -> np.ndarray:
    """Equally spaced interior grid k/(n+1), k = 1..n."""
    if n < 1:
        raise ConfigError(f"tau grid size must be >= 1, got {n}")
    return np.arange(1, n + 1, dtype=float) / (n + 1)


def thin_grid(grid: np.ndarray, every: int) -> np.ndarray:
    """Keep every ``every``-th grid point, centred so the grid stays symmetric."""
    if every < 1:
        raise ConfigError(f"grid thinning must be >= 1, got {every}")
    if every == 1:
        return grid
    offset = ((len(grid) - 1) % every) // 2
    return grid[offset::every]
