"""Tests for log-gamma and the polygamma wrappers."""
import math

import numpy as np
import pytest

from errors import DomainError
from special_functions import digamma, log_gamma, polygamma, tetragamma, trigamma

EULER_GAMMA = 0.5772156649015329
ZETA3 = 1.2020569031595942


class TestClassicalValues:

    def test_log_gamma(self):
        assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-15)
        assert log_gamma(2.0) == pytest.approx(0.0, abs=1e-15)
        assert log_gamma(0.5) == pytest.approx(0.5723649429247001, rel=1e-12)

    def test_digamma(self):
        assert digamma(1.0) == pytest.approx(-EULER_GAMMA, rel=1e-12)
        assert digamma(2.0) == pytest.approx(1.0 - EULER_GAMMA, rel=1e-12)

    def test_trigamma(self):
        assert trigamma(1.0) == pytest.approx(math.pi ** 2 / 6, rel=1e-12)
        assert trigamma(2.0) == pytest.approx(math.pi ** 2 / 6 - 1, rel=1e-12)

    def test_tetragamma(self):
        assert tetragamma(1.0) == pytest.approx(-2 * ZETA3, rel=1e-10)
        assert tetragamma(2.0) == pytest.approx(-2 * ZETA3 + 2, rel=1e-10)

    def test_array_input_returns_array(self):
        values = trigamma(np.array([1.0, 2.0]))
        np.testing.assert_allclose(values, [math.pi ** 2 / 6, math.pi ** 2 / 6 - 1], rtol=1e-12)

    def test_dispatch(self):
        assert polygamma(0, 3.0) == digamma(3.0)
        assert polygamma(2, 3.0) == tetragamma(3.0)
        with pytest.raises(DomainError):
            polygamma(3, 1.0)


class TestRecurrences:

    grid = np.linspace(0.01, 100, 400)

    def test_digamma_recurrence(self):
        lhs = digamma(self.grid + 1) - digamma(self.grid)
        np.testing.assert_allclose(lhs, 1 / self.grid, atol=1e-12 * np.max(np.abs(digamma(self.grid))))

    def test_trigamma_recurrence(self):
        lhs = trigamma(self.grid + 1) - trigamma(self.grid)
        np.testing.assert_allclose(lhs, -1 / self.grid ** 2, rtol=1e-10)

    def test_tetragamma_recurrence(self):
        lhs = tetragamma(self.grid + 1) - tetragamma(self.grid)
        np.testing.assert_allclose(lhs, 2 / self.grid ** 3, rtol=1e-9)


class TestSignsAndMonotonicity:

    def test_trigamma_positive_decreasing(self):
        values = trigamma(np.geomspace(1e-3, 1e4, 500))
        assert np.all(values > 0)
        assert np.all(np.diff(values) < 0)

    def test_tetragamma_negative_increasing(self):
        values = tetragamma(np.geomspace(1e-3, 1e3, 500))
        assert np.all(values < 0)
        assert np.all(np.diff(values) > 0)


class TestDerivativeChain:

    def test_digamma_matches_log_gamma_difference(self):
        h = 1e-5
        fd = (log_gamma(10.5 + h) - log_gamma(10.5 - h)) / (2 * h)
        assert digamma(10.5) == pytest.approx(fd, abs=1e-8)

    def test_trigamma_matches_second_difference(self):
        x, h = 7.3, 1e-4
        fd = (log_gamma(x + h) - 2 * log_gamma(x) + log_gamma(x - h)) / h ** 2
        assert trigamma(x) == pytest.approx(fd, abs=1e-6)

    def test_tetragamma_matches_trigamma_difference(self):
        h = 1e-5
        fd = (trigamma(5.0 + h) - trigamma(5.0 - h)) / (2 * h)
        assert tetragamma(5.0) == pytest.approx(fd, abs=1e-6)

    def test_step_halving_converges_at_second_order(self):
        x = 2.5

        def error(h):
            return abs((trigamma(x + h) - trigamma(x - h)) / (2 * h) - tetragamma(x))

        ratio = error(1e-2) / error(5e-3)
        assert 3.5 < ratio < 4.5


class TestDomain:

    @pytest.mark.parametrize('bad', [0.0, -1.0, math.inf, math.nan])
    @pytest.mark.parametrize('func', [log_gamma, digamma, trigamma, tetragamma])
    def test_rejects_non_positive(self, func, bad):
        with pytest.raises(DomainError):
            func(bad)
