"""
Test cases for the integrated check-loss solver.
"""
from dataclasses import replace

import numpy as np
import pytest

from qpma.core.candidate_models import build_design, fit_specs
from qpma.core.iqr_solver import (
    CheckLoss,
    FitConfig,
    SmoothedObjective,
    check_loss,
    default_smoothing,
    fit,
    fit_loo,
    integrated_loss,
    smoothed_check_loss,
)
from qpma.core.tau_basis import TauBasis, TauFamily, tau_grid
from qpma.errors import CollinearDesignError, ConfigError, DataError
from qpma.simulation.scenarios import gen_example1

CONSTANT = TauBasis.constant()
GAUSSIAN = TauBasis.of(TauFamily.GAUSSIAN)


def intercept(n):
    return np.ones((n, 1))


class TestCheckLoss:
    """rho_tau and its Moreau smoothing."""

    @pytest.mark.parametrize("tau,u,expected", [(0.5, 2.0, 1.0), (0.9, -1.0, 0.1), (0.25, 4.0, 1.0)])
    def test_values(self, tau, u, expected):
        assert check_loss(tau, u) == pytest.approx(expected, abs=1e-15)
        assert CheckLoss(tau)(u) == pytest.approx(expected, abs=1e-15)

    def test_reflection_identities(self, rng):
        """rho_tau(u) = rho_{1-tau}(-u) and rho_tau(u) + rho_tau(-u) = |u|."""
        u = rng.normal(scale=10, size=1000)
        tau = rng.uniform(0.001, 0.999, size=1000)
        assert np.max(np.abs(check_loss(tau, u) - check_loss(1 - tau, -u))) <= 1e-12
        assert np.max(np.abs(check_loss(tau, u) + check_loss(tau, -u) - np.abs(u))) <= 1e-12

    def test_smoothing_bounds(self, rng):
        """rho - h/2 <= smoothed <= rho, with equality at zero."""
        u = rng.normal(scale=3, size=2000)
        tau = rng.uniform(0.01, 0.99, size=2000)
        h = 0.4
        exact = check_loss(tau, u)
        smooth = smoothed_check_loss(tau, u, h)
        assert np.all(smooth <= exact + 1e-15)
        assert np.all(smooth >= exact - h / 2 - 1e-15)
        assert smoothed_check_loss(0.3, 0.0, h) == 0.0
        np.testing.assert_array_equal(CheckLoss(0.3).smoothed(u, h), smoothed_check_loss(0.3, u, h))

    def test_invalid_tau(self):
        with pytest.raises(DataError):
            CheckLoss(1.0)


class TestIntegratedLoss:
    """Grid-averaged loss."""

    def test_zero_theta(self, rng):
        y = rng.normal(size=15)
        grid = tau_grid(7)
        loss = integrated_loss(np.zeros((2, 2)), rng.normal(size=(15, 2)), y, GAUSSIAN, grid)
        expected = np.mean([np.mean(check_loss(t, y)) for t in grid])
        assert loss == pytest.approx(expected, rel=1e-12)

    def test_half_absolute_loss_on_fine_grid(self, rng):
        y = rng.normal(size=25)
        theta = 0.3
        loss = integrated_loss(np.array([[theta]]), intercept(25), y, CONSTANT, tau_grid(10 ** 4))
        target = 0.5 * np.mean(np.abs(y - theta))
        assert abs(loss - target) < 1e-3 * np.mean(np.abs(y - theta))

    def test_midpoint_convexity(self, rng):
        design = rng.normal(size=(20, 3))
        y = rng.normal(size=20)
        grid = tau_grid(9)
        for _ in range(100):
            a, b = rng.normal(size=(3, 2)), rng.normal(size=(3, 2))
            mid = integrated_loss((a + b) / 2, design, y, GAUSSIAN, grid)
            ends = (integrated_loss(a, design, y, GAUSSIAN, grid) + integrated_loss(b, design, y, GAUSSIAN, grid)) / 2
            assert mid <= ends + 1e-12


class TestSmoothedObjective:
    """Analytic gradient of the smoothed objective."""

    def test_gradient_matches_central_differences(self, rng):
        design = rng.normal(size=(30, 3))
        y = rng.normal(size=30)
        grid = tau_grid(11)
        objective = SmoothedObjective(design, y, GAUSSIAN.matrix(grid), grid, h=0.5)
        for _ in range(5):
            flat = rng.normal(size=6)
            _, grad = objective.value_and_grad(flat)
            eps = 1e-6
            numeric = np.array([
                (objective.value_and_grad(flat + eps * e)[0] - objective.value_and_grad(flat - eps * e)[0]) / (2 * eps)
                for e in np.eye(6)
            ])
            assert np.linalg.norm(grad - numeric) <= 1e-4 * max(np.linalg.norm(numeric), 1e-8)


class TestFit:
    """Full-sample estimation."""

    def test_constant_response_fits_exactly(self):
        result = fit(intercept(5), np.full(5, 3.0), CONSTANT)
        assert result.theta[0, 0] == pytest.approx(3.0, abs=1e-8)
        assert result.objective <= 1e-10

    def test_three_point_median(self):
        result = fit(intercept(3), np.array([1.0, 2.0, 100.0]), CONSTANT, FitConfig(grid_size=10 ** 4))
        assert result.theta[0, 0] == pytest.approx(2.0, abs=0.05)

    def test_median_oracle_on_random_samples(self, rng):
        """Constant basis reduces the problem to half absolute loss, solved by the median."""
        for _ in range(20):
            y = rng.standard_t(df=4, size=101) * rng.uniform(0.5, 3) + rng.normal()
            result = fit(intercept(101), y, CONSTANT)
            iqr = np.subtract(*np.percentile(y, [75, 25]))
            assert abs(result.theta[0, 0] - np.median(y)) <= 0.05 * iqr

    def test_location_scale_recovery(self):
        """Normal(3, 2) quantiles are exactly 3 + 2 qnorm(tau)."""
        estimates = []
        for seed in range(5):
            y = np.random.default_rng(seed).normal(3.0, 2.0, size=2000)
            estimates.append(fit(intercept(2000), y, GAUSSIAN, FitConfig(grid_size=199)).theta[0])
        mean = np.mean(estimates, axis=0)
        assert mean[0] == pytest.approx(3.0, abs=0.1)
        assert mean[1] == pytest.approx(2.0, abs=0.1)

    def test_noise_free_line_is_recovered(self, rng):
        x = rng.uniform(size=30)
        design = np.column_stack([np.ones(30), x])
        result = fit(design, 1.0 + 2.0 * x, CONSTANT, FitConfig(grid_size=5))
        np.testing.assert_allclose(result.theta[:, 0], [1.0, 2.0], atol=1e-4)

    def test_collinear_design_rejected(self, rng):
        x = rng.normal(size=(10, 1))
        with pytest.raises(CollinearDesignError, match="collinear design"):
            fit(np.hstack([x, x]), rng.normal(size=10), CONSTANT)

    def test_more_columns_than_rows_rejected(self, rng):
        with pytest.raises(CollinearDesignError):
            fit(rng.normal(size=(2, 3)), rng.normal(size=2), CONSTANT)

    def test_dimension_mismatch_rejected(self, rng):
        with pytest.raises(DataError):
            fit(rng.normal(size=(5, 2)), rng.normal(size=4), CONSTANT)

    def test_iteration_budget_reports_not_converged(self, rng):
        design = np.column_stack([np.ones(50), rng.normal(size=50)])
        y = design @ [1.0, -2.0] + rng.standard_cauchy(size=50)
        result = fit(design, y, GAUSSIAN, FitConfig(max_iters=1, continuation=0))
        assert result.converged is False
        assert np.isfinite(result.objective)

    def test_history_never_increases(self, rng):
        design = np.column_stack([np.ones(60), rng.normal(size=60)])
        y = design @ [0.5, 1.5] + rng.standard_t(df=3, size=60)
        history = np.asarray(fit(design, y, GAUSSIAN).history)
        assert history.size > 1
        assert np.all(np.diff(history) <= 1e-12 * max(1.0, abs(history[0])))

    def test_no_perturbation_improves_the_fit(self, rng):
        design = np.column_stack([np.ones(60), rng.uniform(size=60)])
        y = design @ [1.0, -2.0] + rng.normal(size=60)
        grid = tau_grid(60)
        result = fit(design, y, GAUSSIAN)
        loss = integrated_loss(result.theta, design, y, GAUSSIAN, grid)
        for _ in range(100):
            delta = rng.normal(size=result.theta.shape)
            delta *= 0.5 / np.linalg.norm(delta)
            assert loss <= integrated_loss(result.theta + delta, design, y, GAUSSIAN, grid) + 1e-6

    @pytest.mark.parametrize("seed", range(5))
    def test_rescaled_column_leaves_fitted_values(self, seed):
        rng = np.random.default_rng(seed)
        design = np.column_stack([np.ones(30), rng.normal(size=30)])
        y = design @ [1.0, 0.7] + rng.normal(size=30)
        grid = tau_grid(30)
        scaled = design.copy()
        scaled[:, 1] *= 7.0

        base = fit(design, y, GAUSSIAN)
        again = fit(scaled, y, GAUSSIAN)
        np.testing.assert_allclose(again.theta[1], base.theta[1] / 7.0, atol=1e-6)
        np.testing.assert_allclose(scaled @ again.theta @ GAUSSIAN.matrix(grid).T,
                                   design @ base.theta @ GAUSSIAN.matrix(grid).T, atol=1e-6)

    def test_rescaled_spline_design_leaves_fitted_values(self):
        data = gen_example1(60, 0.0, 0.8, seed=5).train
        design = build_design(data, 1, fit_specs(data)[1])
        scaled = design.copy()
        scaled[:, -1] *= 7.0
        grid = tau_grid(60)
        base = fit(design, data.y, GAUSSIAN)
        again = fit(scaled, data.y, GAUSSIAN)
        np.testing.assert_allclose(scaled @ again.theta @ GAUSSIAN.matrix(grid).T,
                                   design @ base.theta @ GAUSSIAN.matrix(grid).T, atol=1e-6)

    def test_default_smoothing_scales_with_data(self, rng):
        y = rng.normal(size=200)
        assert default_smoothing(5 * y) == pytest.approx(5 * default_smoothing(y))

    @pytest.mark.parametrize("field,value", [
        ("max_iters", 0), ("tol", 0.0), ("smoothing", -1.0), ("continuation", -1), ("grid_size", 0),
    ])
    def test_config_validation(self, field, value):
        with pytest.raises(ConfigError, match=field):
            FitConfig(**{field: value})


class TestFitLoo:
    """Leave-one-out refits."""

    def test_duplicated_rows(self):
        result = fit_loo(intercept(2), np.array([5.0, 5.0]), CONSTANT, None, 0)
        assert result.theta[0, 0] == pytest.approx(5.0, abs=1e-8)

    def test_median_of_remaining(self, rng):
        y = rng.normal(size=22)
        result = fit_loo(intercept(22), y, CONSTANT, FitConfig(), 3)
        rest = np.delete(y, 3)
        iqr = np.subtract(*np.percentile(rest, [75, 25]))
        assert abs(result.theta[0, 0] - np.median(rest)) <= 0.05 * iqr

    def test_index_out_of_range(self):
        with pytest.raises(DataError, match="out of range"):
            fit_loo(intercept(3), np.zeros(3), CONSTANT, None, 3)

    def test_single_observation_rejected(self):
        with pytest.raises(DataError, match="at least two"):
            fit_loo(intercept(1), np.zeros(1), CONSTANT, None, 0)

    def test_warm_and_cold_start_agree(self):
        data = gen_example1(50, 0.0, 0.8, seed=11).train
        specs = fit_specs(data)
        design = build_design(data, 1, specs[1])
        base = FitConfig(smoothing=0.05, continuation=0, max_iters=2000, tol=1e-10)
        full = fit(design, data.y, GAUSSIAN, base)

        cold = fit_loo(design, data.y, GAUSSIAN, base, 7)
        warm = fit_loo(design, data.y, GAUSSIAN, replace(base, warm_start=full.theta, loo_max_iters=2000), 7)
        assert abs(cold.smoothed_objective - warm.smoothed_objective) <= 10 * base.tol + 1e-6

    def test_warm_start_caps_iterations(self, rng):
        design = np.column_stack([np.ones(40), rng.normal(size=40)])
        y = rng.normal(size=40)
        full = fit(design, y, GAUSSIAN)
        cfg = FitConfig(warm_start=full.theta, loo_max_iters=3, max_iters=500)
        assert fit_loo(design, y, GAUSSIAN, cfg, 0).n_iter <= 3 * (cfg.continuation + 1)
