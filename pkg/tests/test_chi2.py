import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate, special, stats

from chi2 import Chi2Params, quantile, survival, tail_bound_check
from errors import DomainError


def survival_by_integration(t, df):
    """Integrate the chi-square density from t to infinity."""
    log_norm = (df / 2.0) * math.log(2.0) + special.gammaln(df / 2.0)

    def density(x):
        return math.exp((df / 2.0 - 1.0) * math.log(x) - x / 2.0 - log_norm)

    value, _ = integrate.quad(density, t, np.inf, epsabs=1e-14, epsrel=1e-13, limit=200)
    return value


class TestSurvival:
    @pytest.mark.parametrize("df", range(1, 11))
    def test_zero_and_negative_give_one(self, df):
        assert survival(0.0, Chi2Params(df)) == 1.0
        assert survival(-3.0, Chi2Params(df)) == 1.0

    def test_exponential_case(self):
        assert survival(2 * math.log(2), Chi2Params(2)) == pytest.approx(0.5, abs=1e-15)

    def test_five_percent_point(self):
        assert survival(11.0705, Chi2Params(5)) == pytest.approx(0.05, abs=5e-5)

    @pytest.mark.parametrize("df", range(1, 11))
    @pytest.mark.parametrize("t", [0.3, 1.7, 4.0, 9.5, 22.0])
    def test_matches_integration_oracle(self, df, t):
        assert abs(survival(t, Chi2Params(df)) - survival_by_integration(t, df)) <= 1e-10

    @pytest.mark.parametrize("df,ncp", [(1, 0.5), (3, 4.0), (5, 10.0), (10, 30.0), (2, 200.0)])
    def test_noncentral_matches_scipy(self, df, ncp):
        t = np.linspace(0.1, 3 * (df + ncp), 40)
        assert_allclose(survival(t, Chi2Params(df, ncp)), stats.ncx2.sf(t, df, ncp), atol=1e-9)

    def test_tiny_noncentrality_matches_central(self):
        t = np.linspace(0.0, 30.0, 61)
        assert_allclose(survival(t, Chi2Params(4, 1e-12)), survival(t, Chi2Params(4)), atol=1e-10)

    def test_rises_with_noncentrality_up_to_one(self):
        values = [survival(7.8147, Chi2Params(3, ncp)) for ncp in np.linspace(0.0, 150.0, 151)]
        assert np.all(np.diff(values) >= -1e-12)
        assert max(values) <= 1.0
        assert values[-1] == pytest.approx(1.0, abs=1e-12)

    def test_array_input_and_monotonicity(self):
        t = np.linspace(-1.0, 50.0, 500)
        values = survival(t, Chi2Params(5))
        assert values.shape == t.shape
        assert np.all(np.diff(values) <= 0)
        assert np.all((values >= 0) & (values <= 1))

    def test_monte_carlo_agreement(self):
        rng = np.random.default_rng(2024)
        h, draws = 5, 1_000_000
        sample = rng.chisquare(h, size=draws)
        for t in np.linspace(0.5, 20.0, 10):
            expected = survival(t, Chi2Params(h))
            se = math.sqrt(expected * (1 - expected) / draws)
            assert abs(np.mean(sample >= t) - expected) <= 4 * se

    def test_params_validation(self):
        with pytest.raises(DomainError):
            Chi2Params(0)
        with pytest.raises(DomainError):
            Chi2Params(3, -1.0)


class TestQuantile:
    def test_one_df_five_percent(self):
        assert quantile(0.05, Chi2Params(1)) == pytest.approx(3.8415, abs=1e-4)

    def test_near_one_is_near_zero(self):
        assert quantile(1 - 1e-12, Chi2Params(3)) < 1e-6

    @pytest.mark.parametrize("params", [Chi2Params(1), Chi2Params(5), Chi2Params(5, 10.0), Chi2Params(12, 3.0)])
    def test_round_trip(self, params):
        qs = np.linspace(0.005, 0.995, 100)
        points = np.array([quantile(q, params) for q in qs])
        assert_allclose([survival(x, params) for x in points], qs, atol=1e-8)
        assert np.all(np.diff(points) < 0)

    @pytest.mark.parametrize("q", [0.0, 1.0, -0.1, 1.5])
    def test_domain(self, q):
        with pytest.raises(DomainError):
            quantile(q, Chi2Params(2))


class TestTailBound:
    GRID = [10 ** k for k in range(3, 9)]

    def test_default_constant_is_bounded(self):
        report = tail_bound_check(self.GRID, 5, 0.375)
        assert report.bounded
        assert report.spread < 10
        assert len(report.ratios) == len(self.GRID)

    def test_negative_d0_for_two_functions(self):
        report = tail_bound_check(self.GRID, 2, -2.0)
        assert report.bounded
        # exact for h = 2: G(b_p) p / (log p)^2 = 1
        assert_allclose(report.ratios, 1.0, rtol=1e-10)

    def test_single_point_grid(self):
        report = tail_bound_check([1000], 5, 0.375)
        assert report.spread == pytest.approx(1.0)
        assert report.bounded

    def test_needs_two_functions(self):
        with pytest.raises(DomainError):
            tail_bound_check(self.GRID, 1, 0.0)
