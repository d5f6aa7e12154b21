"""Selection rates, trimmed means, and tone lookup."""

import numpy as np
import pytest

from gtisp.exceptions import DataError, ParameterError
from gtisp.metrics import (
    scaled_deviance_error,
    selection_stats,
    spectral_mse_star,
    tone_columns,
    tone_groups,
    trimmed_mean,
)
from gtisp.simulate import build_dictionary


class TestSelectionStats:
    def test_rates(self):
        s = selection_stats({0, 1, 5}, {0, 1, 2}, p=10)
        assert s.miss == pytest.approx(1 / 3)
        assert s.false_alarm == pytest.approx(1 / 7)
        assert s.joint == 0.0
        assert s.n_relevant == 3 and s.n_selected == 3

    def test_joint_detection_allows_extras(self):
        s = selection_stats({0, 1, 2, 9}, {0, 1, 2}, p=10)
        assert s.miss == 0.0 and s.joint == 1.0
        assert s.false_alarm == pytest.approx(1 / 7)

    def test_empty_truth(self):
        s = selection_stats({4}, set(), p=10)
        assert s.miss == 0.0 and s.joint == 1.0
        assert s.false_alarm == pytest.approx(0.1)

    def test_everything_relevant(self):
        s = selection_stats({0}, {0, 1}, p=2)
        assert s.false_alarm == 0.0
        assert s.miss == 0.5

    def test_out_of_range_rejected(self):
        with pytest.raises(ParameterError):
            selection_stats({10}, {0}, p=10)
        with pytest.raises(ParameterError):
            selection_stats({0}, {-1}, p=10)

    def test_bounds_random(self, rng):
        for _ in range(25):
            p = int(rng.integers(2, 30))
            sel = set(rng.integers(0, p, size=rng.integers(0, p)).tolist())
            rel = set(rng.integers(0, p, size=rng.integers(0, p)).tolist())
            s = selection_stats(sel, rel, p)
            assert 0.0 <= s.miss <= 1.0
            assert 0.0 <= s.false_alarm <= 1.0
            assert s.joint in (0.0, 1.0)


class TestScalarSummaries:
    def test_scaled_deviance_error(self):
        assert scaled_deviance_error(6.0, 5.0) == pytest.approx(20.0)
        assert scaled_deviance_error(5.0, 5.0) == 0.0
        with pytest.raises(DataError):
            scaled_deviance_error(1.0, 0.0)

    def test_trimmed_mean_cuts_per_tail(self):
        assert trimmed_mean([1, 2, 3, 4, 5], 0.4) == 3.0
        assert trimmed_mean([5, 1, 4, 2, 3], 0.4) == 3.0  # order-free
        assert trimmed_mean([1, 2, 3, 4], 0.0) == 2.5
        # floor(0.45*5) = 2 per tail leaves the median
        assert trimmed_mean([10, 1, 3, 100, -50], 0.9) == 3.0

    def test_trimmed_mean_validation(self):
        with pytest.raises(ParameterError):
            trimmed_mean([1.0], 1.0)
        with pytest.raises(DataError):
            trimmed_mean([], 0.2)

    def test_mse_star(self):
        assert spectral_mse_star([1.0, 2.0], [0.0, 0.0], 1.0) == 1.5
        assert spectral_mse_star([1.0], [1.0], 0.25) == -0.25
        with pytest.raises(DataError):
            spectral_mse_star([1.0, 2.0], [1.0], 0.0)


class TestToneLookup:
    def test_on_ladder_tones(self):
        d = build_dictionary(np.arange(100))
        np.testing.assert_array_equal(tone_groups(d, [0.25, 0.252]), [124, 125])
        np.testing.assert_array_equal(
            tone_columns(d, [0.25, 0.252]), [248, 249, 250, 251]
        )

    def test_tolerance_window(self):
        d = build_dictionary(np.arange(100))
        # 0.2507 reaches 0.25 (gap 7e-4) but not 0.252 (gap 1.3e-3)
        np.testing.assert_array_equal(tone_groups(d, [0.2507]), [124])
        np.testing.assert_array_equal(tone_groups(d, [0.2515]), [125])
        assert tone_groups(d, [0.4], tol=1e-9).size == 1  # exact ladder hit

    def test_top_frequency_group_is_singleton_column(self):
        d = build_dictionary(np.arange(100))
        np.testing.assert_array_equal(tone_columns(d, [0.5]), [498])
