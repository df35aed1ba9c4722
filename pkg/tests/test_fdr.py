import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from chi2 import Chi2Params, survival
from errors import DomainError, PowerUndefinedError
from fdr import (
    FdrConfig,
    FdrSelection,
    bp_bound,
    default_d0,
    evaluate_selection,
    fallback_threshold,
    false_discovery_proportion,
    fdp_hat,
    find_threshold,
)

EXAMPLE_STATS = np.array([1.0, 2.0, 10.0, 20.0])


@pytest.mark.parametrize("h,expected", [(5, 0.375), (8, 1.875), (4, -0.5), (1, -0.5)])
def test_default_d0(h, expected):
    assert default_d0(h) == expected


class TestBounds:
    def test_bp_formula(self):
        d0 = 0.375
        assert bp_bound(16, d0) == pytest.approx(2 * math.log(16) + 2 * d0 * math.log(math.log(16)))

    def test_bp_without_loglog_term(self):
        assert bp_bound(500, 0.0) == pytest.approx(2 * math.log(500))

    def test_bp_at_two_thousand(self):
        assert bp_bound(2000, 0.375) == pytest.approx(16.723, abs=1e-3)

    def test_fallback_single_function(self):
        assert fallback_threshold(300, 1) == pytest.approx(2 * math.log(300))

    def test_fallback_coincides_with_fixed_region_variant(self):
        cfg = FdrConfig.with_loglog_coefficients(0.1, 5, 2000, 0.75, 4.0)
        assert cfg.fallback(2000) == pytest.approx(fallback_threshold(2000, 5))
        assert cfg.fallback(2000) == pytest.approx(23.315, abs=1e-3)
        assert cfg.search_cap(2000) == pytest.approx(bp_bound(2000, 0.375))

    @pytest.mark.parametrize("p", [0, 1, 2])
    def test_small_p(self, p):
        with pytest.raises(DomainError):
            bp_bound(p, 0.0)
        with pytest.raises(DomainError):
            fallback_threshold(p, 5)


class TestFdpHat:
    def test_zero_threshold(self, rng):
        assert fdp_hat(0.0, rng.chisquare(3, size=50), 3) == pytest.approx(1.0)

    def test_hand_arithmetic(self):
        assert fdp_hat(5.0, EXAMPLE_STATS, 2) == pytest.approx(4 * math.exp(-2.5) / 2)

    def test_above_all_statistics(self):
        assert fdp_hat(60.0, EXAMPLE_STATS, 2) == pytest.approx(4 * math.exp(-30.0))


class TestFindThreshold:
    def test_hand_enumeration(self):
        selection = find_threshold(EXAMPLE_STATS, FdrConfig(alpha=0.2, h=2, search_cap_override=25.0))
        assert selection.threshold == 10.0
        assert selection.sorted_rejected() == [3, 4]
        assert selection.fdp_estimate == pytest.approx(4 * math.exp(-5.0) / 2)
        assert not selection.used_fallback

    def test_small_cap_falls_back(self):
        selection = find_threshold(EXAMPLE_STATS, FdrConfig(alpha=0.2, h=2))
        assert selection.used_fallback
        assert selection.threshold == pytest.approx(fallback_threshold(4, 2))
        assert selection.sorted_rejected() == [3, 4]

    def test_pure_null_uses_fallback(self):
        selection = find_threshold(np.full(200, 1e-3), FdrConfig(alpha=0.1, h=5))
        assert selection.used_fallback
        assert selection.rejected == set()

    def test_infinite_statistics_are_all_rejected(self):
        selection = find_threshold(np.full(200, np.inf), FdrConfig(alpha=0.1, h=5))
        assert not selection.used_fallback
        assert selection.threshold == pytest.approx(selection.search_cap)
        assert selection.rejected == set(range(1, 201))

    def test_large_alpha_gives_large_set(self, rng):
        stats = rng.chisquare(5, size=100)
        loose = find_threshold(stats, FdrConfig(alpha=0.999, h=5))
        strict = find_threshold(stats, FdrConfig(alpha=0.05, h=5))
        assert not loose.used_fallback
        assert len(loose.rejected) >= 50
        assert strict.rejected <= loose.rejected

    def test_rejections_grow_with_alpha(self, rng):
        stats = np.concatenate([rng.chisquare(5, size=190), rng.noncentral_chisquare(5, 30, size=10)])
        previous = set()
        for alpha in (0.01, 0.05, 0.1, 0.2, 0.5, 0.9):
            selection = find_threshold(stats, FdrConfig(alpha=alpha, h=5))
            assert previous <= selection.rejected
            previous = selection.rejected

    def test_rejected_set_and_estimate_invariants(self, rng):
        for _ in range(20):
            stats = np.concatenate([rng.chisquare(4, size=95), rng.noncentral_chisquare(4, 40, size=5)])
            selection = find_threshold(stats, FdrConfig(alpha=0.1, h=4))
            assert selection.rejected == {j + 1 for j in np.flatnonzero(stats >= selection.threshold)}
            if not selection.used_fallback:
                assert selection.fdp_estimate <= 0.1
                assert selection.threshold <= selection.search_cap

    def test_matches_grid_oracle(self, rng):
        h, alpha = 5, 0.1
        for _ in range(100):
            p = int(rng.integers(20, 200))
            k = int(rng.integers(0, 10))
            stats = np.concatenate([rng.chisquare(h, size=p - k), rng.noncentral_chisquare(h, 25, size=k)])
            cfg = FdrConfig(alpha=alpha, h=h)
            selection = find_threshold(stats, cfg)

            cap = cfg.search_cap(p)
            grid = np.union1d(np.linspace(0.0, cap, 10_000), stats[stats <= cap])
            counts = np.array([np.count_nonzero(stats >= t) for t in grid])
            estimates = p * survival(grid, Chi2Params(h)) / np.maximum(counts, 1)
            qualifying = grid[estimates <= alpha]

            if qualifying.size == 0:
                assert selection.used_fallback
                continue
            assert not selection.used_fallback
            first = qualifying[0]
            assert selection.threshold >= first
            assert selection.rejected == {j + 1 for j in np.flatnonzero(stats >= first)}

    def test_non_finite_statistics(self):
        with pytest.raises(DomainError):
            find_threshold(np.array([1.0, np.nan, 3.0]), FdrConfig())


class TestFdrConfig:
    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, 1.5])
    def test_alpha_range(self, alpha):
        with pytest.raises(DomainError):
            FdrConfig(alpha=alpha)

    def test_default_d0_follows_h(self):
        assert FdrConfig(h=7).d0 == default_d0(7)

    def test_overrides(self):
        cfg = FdrConfig(search_cap_override=12.0, fallback_override=30.0)
        assert (cfg.search_cap(100), cfg.fallback(100)) == (12.0, 30.0)

    def test_region_from_coefficients_or_d0(self):
        loglog = FdrConfig.for_region(0.1, 5, 2000, cap_coefficient=0.75, fallback_coefficient=4.0)
        assert loglog.search_cap(2000) == pytest.approx(2 * math.log(2000) + 0.75 * math.log(math.log(2000)))
        assert FdrConfig.for_region(0.1, 5, 2000, d0=0.5).d0 == 0.5

    @pytest.mark.parametrize("cap,fallback", [(0.75, None), (None, 4.0)])
    def test_lone_coefficient(self, cap, fallback):
        with pytest.raises(DomainError):
            FdrConfig.for_region(0.1, 5, 2000, cap_coefficient=cap, fallback_coefficient=fallback)


class TestEvaluateSelection:
    def test_exact_recovery(self):
        assert evaluate_selection(FdrSelection(threshold=1.0, rejected={1, 2}), {1, 2}) == (0.0, 1.0)

    def test_nothing_rejected(self):
        assert evaluate_selection(FdrSelection(threshold=1.0), {1, 2}) == (0.0, 0.0)

    def test_counting(self):
        fdp, power = evaluate_selection(FdrSelection(threshold=1.0, rejected={1, 2, 3}), {1, 2, 4, 5})
        assert_allclose((fdp, power), (1 / 3, 0.5))

    def test_empty_truth(self):
        with pytest.raises(PowerUndefinedError):
            evaluate_selection(FdrSelection(threshold=1.0, rejected={1}), set())

    def test_false_discovery_proportion(self):
        assert false_discovery_proportion([], [1]) == 0.0
        assert false_discovery_proportion([1, 7, 8, 9], [1]) == 0.75
