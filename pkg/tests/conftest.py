"""Shared test fixtures for qpma tests."""
import numpy as np
import pytest

from qpma.core.candidate_models import ColumnKind, Dataset
from qpma.core.iqr_solver import FitConfig
from qpma.core.jackknife_averaging import WeightConfig


@pytest.fixture
def rng():
    """Seeded generator for test data."""
    return np.random.default_rng(20240607)


@pytest.fixture
def small_dataset(rng):
    """Two continuous covariates and one binary covariate, n=40."""
    n = 40
    x1 = rng.uniform(size=n)
    x2 = rng.uniform(size=n)
    d = rng.binomial(1, 0.5, size=n).astype(float)
    y = 2 * x1 + np.sin(2 * np.pi * x2) + 0.5 * d + 0.3 * rng.standard_normal(n)
    return Dataset(
        y=y,
        x=np.column_stack([x1, x2, d]),
        column_kind=(ColumnKind.CONTINUOUS, ColumnKind.CONTINUOUS, ColumnKind.DISCRETE),
        column_names=("x1", "x2", "d"),
    )


@pytest.fixture
def fast_fit_cfg():
    """Solver settings small enough for unit tests."""
    return FitConfig(max_iters=300, continuation=1, loo_max_iters=30)


@pytest.fixture
def fast_weight_cfg():
    return WeightConfig(subgradient_iters=100, polish_stages=3, polish_iters=100)


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    """Keep commands in-process unless a test asks for more workers."""
    monkeypatch.setenv("QPMA_THREADS", "1")
