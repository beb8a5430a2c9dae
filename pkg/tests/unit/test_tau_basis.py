"""
Test cases for tau bases and grids.
"""
import numpy as np
import pytest

from qpma.core.tau_basis import TauBasis, TauFamily, check_tau, tau_grid, thin_grid
from qpma.errors import ConfigError, DataError


class TestTauBasis:
    """Evaluation of the built-in and custom families."""

    def test_gaussian_at_median(self):
        np.testing.assert_allclose(TauBasis.of(TauFamily.GAUSSIAN).eval(0.5), [1, 0], atol=1e-15)

    def test_cubic_poly_at_median(self):
        np.testing.assert_allclose(TauBasis.of(TauFamily.CUBIC_POLY).eval(0.5), [1, 0.5, 0.25, 0.125])

    def test_mixed_at_median(self):
        np.testing.assert_allclose(TauBasis.of(TauFamily.MIXED).eval(0.5), [1, 0.5, 0, np.log(2)], atol=1e-15)

    def test_inverse_normal_upper_tail(self):
        value = TauBasis.of(TauFamily.GAUSSIAN).eval(0.975)[1]
        assert value == pytest.approx(1.959963984540054, abs=1e-12)

    def test_gaussian_component_is_odd_about_median(self):
        """qnorm(tau) + qnorm(1 - tau) = 0."""
        basis = TauBasis.of(TauFamily.GAUSSIAN)
        grid = tau_grid(199)
        values = basis.matrix(grid)[:, 1] + basis.matrix(1 - grid)[:, 1]
        assert np.max(np.abs(values)) <= 1e-12

    def test_matrix_shape(self):
        basis = TauBasis.of(TauFamily.MIXED)
        assert basis.matrix(tau_grid(7)).shape == (7, 4)

    def test_custom_from_name(self):
        basis = TauBasis.from_name("custom:one, tau, logit")
        assert basis.family is TauFamily.CUSTOM
        assert basis.components == ("one", "tau", "logit")
        assert basis.name == "custom:one,tau,logit"
        assert TauBasis.from_name(basis.name) == basis

    def test_family_from_name(self):
        assert TauBasis.from_name("cubic-poly") == TauBasis.of(TauFamily.CUBIC_POLY)

    def test_unknown_name_rejected(self):
        with pytest.raises(ConfigError, match="unknown tau basis"):
            TauBasis.from_name("splines")

    def test_unknown_component_rejected(self):
        with pytest.raises(ConfigError, match="unknown tau-basis components"):
            TauBasis.from_name("custom:one,cosine")

    def test_bare_custom_rejected(self):
        with pytest.raises(ConfigError):
            TauBasis.from_name("custom")

    @pytest.mark.parametrize("tau", [0.0, 1.0, -0.1, 1.5])
    def test_tau_outside_open_interval(self, tau):
        with pytest.raises(DataError, match="quantile level outside open unit interval"):
            TauBasis.of(TauFamily.GAUSSIAN).eval(tau)

    def test_check_tau_accepts_arrays(self):
        np.testing.assert_array_equal(check_tau([0.1, 0.9]), [0.1, 0.9])


class TestTauGrid:
    """Equally spaced interior grids."""

    @pytest.mark.parametrize("n,expected", [
        (4, [0.2, 0.4, 0.6, 0.8]),
        (1, [0.5]),
        (3, [0.25, 0.5, 0.75]),
    ])
    def test_grid_values(self, n, expected):
        np.testing.assert_allclose(tau_grid(n), expected)

    def test_grid_size_must_be_positive(self):
        with pytest.raises(ConfigError):
            tau_grid(0)

    def test_thin_keeps_symmetry(self):
        grid = tau_grid(9)
        thinned = thin_grid(grid, 4)
        np.testing.assert_allclose(thinned, [0.1, 0.5, 0.9])
        np.testing.assert_allclose(thinned + thinned[::-1], 1.0)

    def test_thin_one_is_identity(self):
        grid = tau_grid(5)
        assert thin_grid(grid, 1) is grid
