"""
Test cases for the fit, weights and predict pipelines.
"""
from unittest.mock import MagicMock

import numpy as np
import pytest

from qpma.core.candidate_models import CandidateModel, ColumnKind, Dataset
from qpma.core.jackknife_averaging import AveragedModel, WeightVector
from qpma.core.spline_basis import make_spec
from qpma.core.tau_basis import TauBasis, TauFamily
from qpma.errors import DataError
from qpma.operations.config_handler import RunConfig
from qpma.operations.model_runner import ModelRunner
from qpma.operations.model_store import FittedModel


@pytest.fixture
def runner(fast_fit_cfg, fast_weight_cfg):
    return ModelRunner(RunConfig(fit=fast_fit_cfg, weights=fast_weight_cfg), logger=MagicMock())


def single_covariate(rng, n=20):
    x = rng.uniform(size=n)
    return Dataset(y=x + 0.1 * rng.normal(size=n), x=x.reshape(-1, 1), column_kind=(ColumnKind.CONTINUOUS,))


class TestFit:
    """Candidate fits plus jackknife weights."""

    def test_weights_and_diagnostics(self, runner, small_dataset):
        fitted = runner.fit(small_dataset, response="y")
        w = fitted.model.weights.w
        assert w.shape == (2,)
        assert w.sum() == pytest.approx(1.0)
        diag = fitted.diagnostics
        assert diag["n"] == 40
        assert diag["tau_grid_size"] == 40
        assert diag["cv_value"] <= min(diag["vertex_cv"]) + 1e-12
        assert [c["name"] for c in diag["candidates"]] == ["M1(x1)", "M2(x2)"]
        assert all(c["smoothing"] > 0 for c in diag["candidates"])
        assert 0.0 <= diag["crossing_rate"] <= 1.0
        assert fitted.config["basis"] == "gaussian"
        assert fitted.column_kinds == small_dataset.column_kind

    def test_single_continuous_covariate(self, runner, rng):
        fitted = runner.fit(single_covariate(rng))
        np.testing.assert_array_equal(fitted.model.weights.w, [1.0])
        assert fitted.diagnostics["cv_value"] is None
        assert fitted.diagnostics["weights_converged"] is True


class TestEstimateWeights:
    """Weight re-selection for stored candidates."""

    def test_keeps_candidates(self, runner, small_dataset):
        fitted = runner.fit(small_dataset)
        again = runner.estimate_weights(fitted, small_dataset)
        assert again.candidates is fitted.candidates
        assert again.diagnostics["cv_value"] <= min(again.diagnostics["vertex_cv"]) + 1e-12
        assert again.config["weights"]["thin"] == 1

    def test_columns_must_match(self, runner, small_dataset, rng):
        fitted = runner.fit(small_dataset)
        with pytest.raises(DataError, match="do not match"):
            runner.estimate_weights(fitted, single_covariate(rng, n=40))


class TestPredict:
    """Averaged predictions and crossing warnings."""

    def test_shape(self, runner, small_dataset):
        fitted = runner.fit(small_dataset)
        predictions = runner.predict(fitted, small_dataset.x[:5], [0.25, 0.5, 0.75])
        assert predictions.shape == (5, 3)

    def test_crossing_is_reported(self):
        basis = TauBasis.of(TauFamily.GAUSSIAN)
        theta = np.zeros((3, 2))
        theta[:, 1] = -1.0
        candidate = CandidateModel(s=0, spline=make_spec([0.0, 1.0], 1, 2), tau_basis=basis,
                                   theta=theta, linear_columns=())
        fitted = FittedModel(model=AveragedModel([candidate], WeightVector([1.0]), ("x",)),
                             response="y", column_kinds=(ColumnKind.CONTINUOUS,))
        logger = MagicMock()
        predictions = ModelRunner(RunConfig(), logger=logger).predict(fitted, np.array([[0.2], [0.7]]), [0.1, 0.9])
        assert np.all(predictions[:, 0] > predictions[:, 1])
        logger.warning.assert_called_once()
        assert "2 of 2 rows" in logger.warning.call_args[0][0]
