# Tests for univariate truncated normal draws.
"""Inverse-CDF truncated normal: bounds, tails, degenerate windows."""

from __future__ import annotations

import numpy as np
import pytest
from scipy.stats import kstest, truncnorm

from core.models.exceptions import InvalidArgumentError
from core.samplers.truncated_normal import (
    truncated_normal_from_uniform,
    truncated_normal_sample,
)


class TestTruncatedNormalFromUniform:
    def test_median_of_symmetric_window_is_mean(self) -> None:
        draw = truncated_normal_from_uniform(1.0, 2.0, -1.0, 3.0, 0.5)
        assert draw == pytest.approx(1.0)

    def test_upper_tail_window_is_accurate(self) -> None:
        draw = truncated_normal_from_uniform(0.0, 1.0, 8.0, 9.0, 0.5)
        assert 8.0 < draw < 8.2

    def test_lower_tail_window(self) -> None:
        draw = truncated_normal_from_uniform(0.0, 1.0, -9.0, -8.0, 0.5)
        assert -8.2 < draw < -8.0

    def test_underflowing_window_uses_midpoint(self) -> None:
        assert truncated_normal_from_uniform(0.0, 1.0, 40.0, 41.0, 0.3) == 40.5

    def test_vectorized(self) -> None:
        draws = truncated_normal_from_uniform(
            np.zeros(3), np.ones(3), np.array([-1.0, 0.0, 2.0]), np.full(3, 3.0), 0.5
        )
        assert draws.shape == (3,)
        assert np.all(draws >= [-1.0, 0.0, 2.0])
        assert np.all(draws <= 3.0)


class TestTruncatedNormalSample:
    def test_zero_noise_returns_clipped_mean(self, rng) -> None:
        quiet = rng.zero_noise()
        assert truncated_normal_sample(5.0, 1.0, 0.0, 1.0, quiet) == 1.0
        assert truncated_normal_sample(0.5, 1.0, 0.0, 1.0, quiet) == 0.5

    def test_invalid_interval(self, rng) -> None:
        with pytest.raises(InvalidArgumentError):
            truncated_normal_sample(0.0, 1.0, 1.0, 1.0, rng)

    def test_invalid_sd(self, rng) -> None:
        with pytest.raises(InvalidArgumentError):
            truncated_normal_sample(0.0, 0.0, 0.0, 1.0, rng)

    def test_broadcast_draws_stay_in_bounds(self, rng) -> None:
        lo = np.linspace(-2.0, 1.0, 500)
        draws = truncated_normal_sample(0.0, 1.0, lo, lo + 0.5, rng)
        assert draws.shape == (500,)
        assert np.all((draws >= lo) & (draws <= lo + 0.5))

    @pytest.mark.slow
    def test_matches_scipy_truncnorm(self, rng) -> None:
        n = 20_000
        draws = truncated_normal_sample(np.full(n, 0.5), 1.5, -1.0, 2.0, rng)
        reference = truncnorm(a=-1.0, b=1.0, loc=0.5, scale=1.5)
        assert kstest(draws, reference.cdf).pvalue > 1e-3
