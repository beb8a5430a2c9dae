"""
Data-generating processes for the two simulation designs.

Example 1 is a partially linear additive model with six continuous and four
discrete covariates and a noise scale calibrated to a target signal ratio.
Example 2 is a heteroscedastic nonparametric model with Gaussian covariates
and six error distributions.
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any, Callable, Dict, Optional

import numpy as np
from scipy import stats
from scipy.optimize import bisect

from ..core.candidate_models import ColumnKind, Dataset
from ..core.tau_basis import check_tau
from ..errors import ConfigError
from .rng import StreamRole, stream

CALIBRATION_SEED = 20240607
CALIBRATION_DRAWS = 10 ** 6


class ScenarioKind(str, Enum):
    EXAMPLE1 = "example1"
    EXAMPLE2 = "example2"


class ErrorCase(str, Enum):
    NORMAL = "normal"
    T3 = "t3"
    NORMAL_MIX = "normal-mix"
    CHISQ1 = "chisq1"
    GAMMA11 = "gamma11"
    LOGNORM = "lognorm"


class SigmaMode(str, Enum):
    SCENARIO = "scenario"
    REPLICATION = "replication"


@dataclass
class Scenario:
    """One simulation cell plus its replication count and master seed."""

    kind: ScenarioKind = ScenarioKind.EXAMPLE1
    n: int = 100
    test_size: int = 100
    t: float = 0.0
    r2: float = 0.8
    p: int = 10
    error_case: ErrorCase = ErrorCase.NORMAL
    reps: int = 50
    seed: int = 20240101
    sigma_mode: SigmaMode = SigmaMode.SCENARIO
    name: str = ""

    def __post_init__(self):
        try:
            self.kind = ScenarioKind(self.kind)
            self.error_case = ErrorCase(self.error_case)
            self.sigma_mode = SigmaMode(self.sigma_mode)
        except ValueError as exc:
            raise ConfigError(f"scenario: {exc}") from None
        if self.n < 2:
            raise ConfigError(f"scenario.n must be >= 2, got {self.n}")
        if self.test_size < 1:
            raise ConfigError(f"scenario.test_size must be >= 1, got {self.test_size}")
        if self.reps < 1:
            raise ConfigError(f"scenario.reps must be >= 1, got {self.reps}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("scenario.seed must be a 64-bit unsigned integer")
        if self.kind is ScenarioKind.EXAMPLE1:
            if self.t < 0:
                raise ConfigError(f"scenario.t must be >= 0, got {self.t}")
            if not 0 < self.r2 < 1:
                raise ConfigError(f"scenario.r2 must lie in (0, 1), got {self.r2}")
        elif self.p < 10:
            raise ConfigError(f"scenario.p must be >= 10 for example2, got {self.p}")
        if not self.name:
            self.name = self.default_name()

    @property
    def rho_x(self) -> float:
        """Correlation between continuous covariates in Example 1."""
        return self.t ** 2 / (1 + self.t ** 2)

    def default_name(self) -> str:
        if self.kind is ScenarioKind.EXAMPLE1:
            return f"example1-n{self.n}-t{self.t:g}-r2{self.r2:g}"
        return f"example2-n{self.n}-p{self.p}-{self.error_case.value}"

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "name": self.name,
            "kind": self.kind.value,
            "n": self.n,
            "test_size": self.test_size,
            "reps": self.reps,
            "seed": self.seed,
        }
        if self.kind is ScenarioKind.EXAMPLE1:
            data.update({"t": self.t, "r2": self.r2, "sigma_mode": self.sigma_mode.value})
        else:
            data.update({"p": self.p, "error_case": self.error_case.value})
        return data


PRESETS: Dict[str, Dict[str, Any]] = {
    "example1-desk": {"kind": "example1", "n": 100, "t": 0.0, "r2": 0.8, "reps": 50},
    "example1-table1": {"kind": "example1", "n": 200, "t": 0.0, "r2": 0.8, "reps": 50},
    "example2-desk": {"kind": "example2", "n": 100, "p": 10, "error_case": "normal", "reps": 30},
}


class OracleQuantile:
    """True conditional quantile signal(x) + scale(x) * Q(tau)."""

    def __init__(self, signal: Callable[[np.ndarray], np.ndarray],
                 scale: Callable[[np.ndarray], np.ndarray],
                 error_quantile: Callable[[np.ndarray], np.ndarray]):
        self._signal = signal
        self._scale = scale
        self._error_quantile = error_quantile

    def __call__(self, x: np.ndarray, grid) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        taus = check_tau(np.atleast_1d(np.asarray(grid, dtype=float)))
        return self._signal(x)[:, None] + self._scale(x)[:, None] * self._error_quantile(taus)[None, :]

    def at(self, x_row, tau: float) -> float:
        return float(self(np.asarray(x_row, dtype=float).reshape(1, -1), [tau])[0, 0])


@dataclass
class GeneratedData:
    train: Dataset
    test: Dataset
    true_quantile: OracleQuantile = field(repr=False)
    sigma: float = 1.0


# Example 1 ------------------------------------------------------------------

def m1(u):
    return (2 * np.asarray(u) - 1) ** 2


def m2(u):
    s = np.sin(2 * np.pi * np.asarray(u))
    return s / (2 - s)


def m3(u):
    s = np.sin(2 * np.pi * np.asarray(u))
    c = np.cos(2 * np.pi * np.asarray(u))
    return 0.1 * s + 0.2 * c + 0.3 * s ** 2 + 0.4 * c ** 3 + 0.5 * s ** 3


def example1_signal(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    return (6 * x[:, 0] + 4 * m1(x[:, 1]) + 4 * m2(x[:, 2]) + 3 * m3(x[:, 3])
            + 2 * x[:, 4] + 2 * x[:, 5] + 2 * x[:, 6]
            - 2 * x[:, 7] - 2 * x[:, 8] - 2 * x[:, 9])


EXAMPLE1_KINDS = (ColumnKind.CONTINUOUS,) * 6 + (ColumnKind.DISCRETE,) * 4
EXAMPLE1_NAMES = tuple(f"x{j}" for j in range(1, 11))


def example1_covariates(rng: np.random.Generator, n: int, t: float) -> np.ndarray:
    w = rng.uniform(size=(n, 6))
    u = rng.uniform(size=(n, 1))
    continuous = (w + t * u) / (1 + t)
    binary = rng.binomial(1, 0.5, size=(n, 2))
    counts = rng.binomial(2, 0.5, size=(n, 2))
    return np.hstack([continuous, binary, counts]).astype(float)


@lru_cache(maxsize=64)
def example1_signal_variance(t: float, draws: int = CALIBRATION_DRAWS) -> float:
    """Monte Carlo variance of the Example 1 signal, fixed per correlation level."""
    rng = stream(CALIBRATION_SEED, 0, StreamRole.CALIBRATION)
    return float(np.var(example1_signal(example1_covariates(rng, draws, t)), ddof=1))


def calibrate_sigma(r2: float, signal_var: float, error_var: float = 1.0) -> float:
    """Noise scale giving signal ratio r2 = Var(signal) / (Var(signal) + sigma^2 Var(eps))."""
    if not 0 < r2 < 1:
        raise ConfigError(f"r2 must lie in (0, 1), got {r2}")
    if not (signal_var > 0 and error_var > 0):
        raise ConfigError("signal and error variances must be positive")
    return float(np.sqrt(signal_var * (1 - r2) / (r2 * error_var)))


def gen_example1(n: int, t: float, r2: float, seed: int, replication: int = 0,
                 test_size: int = 100, sigma_mode: SigmaMode = SigmaMode.SCENARIO) -> GeneratedData:
    Scenario(kind=ScenarioKind.EXAMPLE1, n=n, t=t, r2=r2, test_size=test_size)
    train_rng = stream(seed, replication, StreamRole.TRAIN)
    test_rng = stream(seed, replication, StreamRole.TEST)
    x_train = example1_covariates(train_rng, n, t)
    x_test = example1_covariates(test_rng, test_size, t)

    if SigmaMode(sigma_mode) is SigmaMode.SCENARIO:
        signal_var = example1_signal_variance(float(t))
    else:
        signal_var = float(np.var(example1_signal(x_train), ddof=1))
    sigma = calibrate_sigma(r2, signal_var, 1.0)

    y_train = example1_signal(x_train) + sigma * train_rng.standard_normal(n)
    y_test = example1_signal(x_test) + sigma * test_rng.standard_normal(test_size)
    oracle = OracleQuantile(
        example1_signal,
        lambda x: np.full(np.atleast_2d(x).shape[0], sigma),
        stats.norm.ppf,
    )
    return GeneratedData(
        train=Dataset(y_train, x_train, EXAMPLE1_KINDS, EXAMPLE1_NAMES),
        test=Dataset(y_test, x_test, EXAMPLE1_KINDS, EXAMPLE1_NAMES),
        true_quantile=oracle,
        sigma=sigma,
    )


# Example 2 ------------------------------------------------------------------

MIX_WEIGHT = 0.05
MIX_WIDE_SD = 5.0
LOGNORM_MEANLOG = 0.5
LOGNORM_SDLOG = 0.5


def example2_signal(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    return (4 * np.cos(x[:, 0] * x[:, 1] * x[:, 2] * x[:, 3]) * x[:, 4] * x[:, 5]
            - 3 * np.sin(x[:, 6] * x[:, 7] * x[:, 8] * x[:, 9] / 4))


def example2_scale(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    return np.abs(0.5 * x[:, 8] - 0.5 * x[:, 9]) + 1


def example2_covariance(p: int) -> np.ndarray:
    idx = np.arange(p)
    return 0.5 ** np.abs(idx[:, None] - idx[None, :])


def _mixture_cdf(v: float) -> float:
    return (1 - MIX_WEIGHT) * stats.norm.cdf(v) + MIX_WEIGHT * stats.norm.cdf(v / MIX_WIDE_SD)


def mixture_quantile(tau: float) -> float:
    """Quantile of 0.95 N(0,1) + 0.05 N(0,25) by bisection on the CDF."""
    check_tau(tau)
    bound = 10 * MIX_WIDE_SD
    while _mixture_cdf(-bound) > tau or _mixture_cdf(bound) < tau:
        bound *= 2
    return bisect(lambda v: _mixture_cdf(v) - tau, -bound, bound, xtol=1e-13, maxiter=500)


def _frozen(case: ErrorCase):
    return {
        ErrorCase.NORMAL: stats.norm(),
        ErrorCase.T3: stats.t(df=3),
        ErrorCase.CHISQ1: stats.chi2(df=1),
        ErrorCase.GAMMA11: stats.gamma(a=1, scale=1),
        ErrorCase.LOGNORM: stats.lognorm(s=LOGNORM_SDLOG, scale=np.exp(LOGNORM_MEANLOG)),
    }[case]


def error_quantile(case: ErrorCase, taus) -> np.ndarray:
    taus = check_tau(np.atleast_1d(np.asarray(taus, dtype=float)))
    case = ErrorCase(case)
    if case is ErrorCase.NORMAL_MIX:
        return np.array([mixture_quantile(float(t)) for t in taus])
    return _frozen(case).ppf(taus)


def sample_errors(case: ErrorCase, rng: np.random.Generator, size: int) -> np.ndarray:
    case = ErrorCase(case)
    if case is ErrorCase.NORMAL_MIX:
        wide = rng.uniform(size=size) < MIX_WEIGHT
        return rng.standard_normal(size) * np.where(wide, MIX_WIDE_SD, 1.0)
    return _frozen(case).rvs(size=size, random_state=rng)


def gen_example2(n: int, p: int, error_case: ErrorCase, seed: int, replication: int = 0,
                 test_size: int = 100) -> GeneratedData:
    try:
        error_case = ErrorCase(error_case)
    except ValueError:
        raise ConfigError(f"unknown error case '{error_case}'; expected one of {[c.value for c in ErrorCase]}") from None
    Scenario(kind=ScenarioKind.EXAMPLE2, n=n, p=p, error_case=error_case, test_size=test_size)
    cov = example2_covariance(p)
    kinds = (ColumnKind.CONTINUOUS,) * p
    names = tuple(f"x{j}" for j in range(1, p + 1))

    def draw(role: StreamRole, size: int) -> Dataset:
        rng = stream(seed, replication, role)
        x = rng.multivariate_normal(np.zeros(p), cov, size=size, method="cholesky")
        y = example2_signal(x) + example2_scale(x) * sample_errors(error_case, rng, size)
        return Dataset(y, x, kinds, names)

    oracle = OracleQuantile(example2_signal, example2_scale,
                            lambda taus: error_quantile(error_case, taus))
    return GeneratedData(train=draw(StreamRole.TRAIN, n), test=draw(StreamRole.TEST, test_size),
                         true_quantile=oracle)


def generate(scenario: Scenario, replication: int) -> GeneratedData:
    if scenario.kind is ScenarioKind.EXAMPLE1:
        return gen_example1(scenario.n, scenario.t, scenario.r2, scenario.seed, replication,
                            scenario.test_size, scenario.sigma_mode)
    return gen_example2(scenario.n, scenario.p, scenario.error_case, scenario.seed, replication,
                        scenario.test_size)
