"""
Test cases for OAQPE, crossing diagnostics and method comparison.
"""
import numpy as np
import pytest
from scipy.special import ndtri

from qpma.core.candidate_models import ColumnKind, Dataset, fit_specs
from qpma.core.evaluation import MethodResult, comparison_measures, crossing_diagnostic, oaqpe
from qpma.core.jackknife_averaging import AveragedModel, WeightVector, build_candidates, fit_candidates
from qpma.core.tau_basis import TauBasis, TauFamily, tau_grid
from qpma.errors import DataError


def one_point(y=1.0):
    return Dataset(y=[y], x=[[0.5]], column_kind=(ColumnKind.CONTINUOUS,))


def constant_predictor(value):
    return lambda x, grid: np.full((np.atleast_2d(x).shape[0], len(grid)), value)


def by_name(rows):
    return {row.method: row for row in rows}


class TestOaqpe:
    """Average check loss on a test set."""

    def test_exact_predictor_scores_zero(self):
        assert oaqpe(constant_predictor(2.0), one_point(2.0), [0.3, 0.7]) == 0.0

    def test_direct_formula(self):
        assert oaqpe(constant_predictor(0.0), one_point(1.0), [0.25, 0.5, 0.75]) == pytest.approx(0.5)

    def test_training_grid_sets_the_normaliser(self):
        """Two test rows scored on a five-point training grid: y=(1,3), prediction 0."""
        test = Dataset(y=[1.0, 3.0], x=[[0.1], [0.2]], column_kind=(ColumnKind.CONTINUOUS,))
        grid = tau_grid(5)
        # sum over tau of tau * (1 + 3), divided by 5 points and 2 rows
        assert oaqpe(constant_predictor(0.0), test, grid) == pytest.approx(4 * np.sum(grid) / 10)

    def test_grid_is_required(self):
        with pytest.raises(TypeError):
            oaqpe(constant_predictor(0.0), one_point(1.0))

    def test_shape_checked(self):
        with pytest.raises(DataError, match="shape"):
            oaqpe(lambda x, grid: np.zeros(3), one_point(), [0.5])

    def test_averaged_model_obeys_jensen(self, small_dataset, fast_fit_cfg, rng):
        basis = TauBasis.of(TauFamily.GAUSSIAN)
        fits = fit_candidates(small_dataset, fit_specs(small_dataset), basis, fast_fit_cfg)
        candidates = build_candidates(small_dataset, fits, basis)
        x = rng.uniform(size=(25, 2))
        test = Dataset(
            y=x @ [2.0, 1.0] + rng.normal(size=25),
            x=np.column_stack([x, rng.binomial(1, 0.5, size=25)]),
            column_kind=small_dataset.column_kind,
        )
        grid = tau_grid(10)
        singles = [oaqpe(c.predict_matrix, test, grid) for c in candidates]
        for _ in range(10):
            w = rng.dirichlet(np.ones(2))
            model = AveragedModel(candidates, WeightVector(w))
            assert 0.0 <= oaqpe(model, test, grid) <= w @ singles + 1e-12


class TestCrossing:
    """Monotonicity of predicted quantiles along the grid."""

    @pytest.mark.parametrize("predictor,expected", [
        (lambda x, grid: np.tile(ndtri(np.asarray(grid)), (len(x), 1)), 0.0),
        (constant_predictor(4.0), 0.0),
        (lambda x, grid: -np.tile(np.asarray(grid), (len(x), 1)), 1.0),
    ])
    def test_reference_predictors(self, predictor, expected):
        test = Dataset(y=[0.0, 1.0, 2.0], x=[[0.1], [0.2], [0.3]], column_kind=(ColumnKind.CONTINUOUS,))
        assert crossing_diagnostic(predictor, test, tau_grid(9)) == expected

    def test_grid_must_increase(self):
        with pytest.raises(DataError, match="increasing"):
            crossing_diagnostic(constant_predictor(0.0), one_point(), [0.6, 0.4])


class TestComparisonMeasures:
    """Average OAQPE, winning ratio and loss to the reference."""

    def test_split_wins(self):
        rows = by_name(comparison_measures(
            [MethodResult("A", [1.0, 3.0]), MethodResult("B", [2.0, 2.0])], reference="A"))
        assert rows["A"].winning_ratio == 0.5
        assert rows["B"].winning_ratio == 0.5
        assert rows["B"].loss_to_reference == 0.5
        assert rows["A"].loss_to_reference is None
        assert rows["A"].average_oaqpe == 2.0
        assert rows["A"].sd_oaqpe == pytest.approx(np.sqrt(2.0))

    def test_dominated_method(self):
        rows = by_name(comparison_measures(
            [MethodResult("jqplma", [1.0, 1.0, 1.0]), MethodResult("ew", [2.0, 3.0, 4.0])]))
        assert rows["ew"].winning_ratio == 0.0
        assert rows["ew"].loss_to_reference == 1.0
        assert rows["jqplma"].winning_ratio == 1.0

    def test_ties_win_nothing(self):
        rows = by_name(comparison_measures(
            [MethodResult("A", [1.0, 1.0]), MethodResult("B", [1.0, 2.0])], reference="A"))
        assert rows["A"].winning_ratio == 0.5
        assert rows["B"].winning_ratio == 0.0
        assert rows["B"].loss_to_reference == 0.5

    def test_ratios_sum_to_at_most_one(self, rng):
        results = [MethodResult(name, rng.integers(1, 4, size=20).astype(float)) for name in "ABC"]
        assert sum(r.winning_ratio for r in comparison_measures(results, "A")) <= 1.0 + 1e-12

    def test_permutation_equivariant(self, rng):
        results = [MethodResult(name, rng.uniform(size=8)) for name in "ABC"]
        forward = by_name(comparison_measures(results, "A"))
        backward = by_name(comparison_measures(results[::-1], "A"))
        assert forward == backward

    def test_single_replication(self):
        rows = by_name(comparison_measures([MethodResult("A", [1.0]), MethodResult("B", [2.0])], "A"))
        assert rows["A"].sd_oaqpe == 0.0
        assert rows["A"].winning_ratio == 1.0

    def test_mismatched_replications(self):
        with pytest.raises(DataError, match="different numbers"):
            comparison_measures([MethodResult("A", [1.0]), MethodResult("B", [1.0, 2.0])])

    def test_negative_values_rejected(self):
        with pytest.raises(DataError):
            MethodResult("A", [-1.0])

    def test_missing_reference_leaves_loss_empty(self):
        rows = comparison_measures([MethodResult("A", [1.0])], reference="jqplma")
        assert rows[0].loss_to_reference is None
