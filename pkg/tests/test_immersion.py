"""Tests for the affine immersion and the exponential-curve tube."""
import math

import numpy as np
import pytest

from distributions import GammaParams, LogGammaParams
from errors import DomainError
from immersion import (DEFAULT_MU_RANGE, TransversalField, TubeSpec, certify_alpha_interval,
                       distance_to_exponential_curve, exponential_curve, gamma_metric_2d,
                       immerse_gamma, immersion_surface_grid, immersion_tangents,
                       loggamma_isometry, tube_contains)
from metric_fields import gamma_natural_field


class TestImmersion:

    def test_graph_height(self):
        point = immerse_gamma(2.0, 3.0)
        assert point.z == pytest.approx(math.log(2.0) - 3.0 * math.log(2.0))
        assert point.beta == pytest.approx(1.5)
        np.testing.assert_allclose(point.as_r3, [2.0, 3.0, point.z])

    def test_exponential_curve(self):
        assert exponential_curve(2.0).z == pytest.approx(-math.log(2.0))
        assert exponential_curve(1.0).z == pytest.approx(0.0, abs=1e-15)

    def test_rejects_non_positive(self):
        with pytest.raises(DomainError):
            immerse_gamma(0.0, 1.0)
        with pytest.raises(DomainError):
            immerse_gamma(1.0, -1.0)

    def test_tangents_match_differences(self):
        mu, alpha, h = 1.3, 2.2, 1e-6
        tangents = immersion_tangents(mu, alpha)
        d_mu = (immerse_gamma(mu + h, alpha).as_r3 - immerse_gamma(mu - h, alpha).as_r3) / (2 * h)
        d_alpha = (immerse_gamma(mu, alpha + h).as_r3 - immerse_gamma(mu, alpha - h).as_r3) / (2 * h)
        np.testing.assert_allclose(tangents, [d_mu, d_alpha], atol=1e-8)

    def test_vertical_field_is_transversal(self):
        xi = TransversalField()
        assert all(xi.is_transversal(mu, a) for mu in (0.1, 1.0, 10.0) for a in (0.2, 1.0, 5.0))

    def test_metric_in_natural_chart(self):
        np.testing.assert_allclose(gamma_metric_2d(2.0, 3.0),
                                   gamma_natural_field().metric_at(np.array([2.0, 3.0])))
        with pytest.raises(DomainError):
            gamma_metric_2d(-1.0, 1.0)

    def test_loggamma_isometry(self):
        assert loggamma_isometry(GammaParams(2.0, 3.0)) == LogGammaParams(2.0, 3.0)


class TestCurveDistance:

    @pytest.mark.parametrize('mu', [0.01, 0.5, 1.0, 7.0])
    def test_points_on_curve(self, mu):
        found = distance_to_exponential_curve(exponential_curve(mu).as_r3)
        assert found.distance < 1e-6
        assert found.mu_star == pytest.approx(mu, rel=1e-4)
        assert not found.boundary_minimum

    @pytest.mark.parametrize('mu,alpha', [(1.0, 1.1), (0.3, 0.8), (4.0, 2.0)])
    def test_lower_bound(self, mu, alpha):
        found = distance_to_exponential_curve(immerse_gamma(mu, alpha).as_r3)
        assert found.distance >= abs(alpha - 1.0) - 1e-12
        on_curve = exponential_curve(mu).as_r3
        assert found.distance <= np.linalg.norm(immerse_gamma(mu, alpha).as_r3 - on_curve) + 1e-12

    def test_boundary_minimum(self):
        found = distance_to_exponential_curve(exponential_curve(1e4).as_r3)
        assert found.boundary_minimum
        assert found.mu_star == DEFAULT_MU_RANGE[1]

    def test_bad_range(self):
        with pytest.raises(DomainError):
            distance_to_exponential_curve((1.0, 1.0, 0.0), mu_range=(2.0, 1.0))


class TestTube:

    def test_spec_validation(self):
        with pytest.raises(DomainError):
            TubeSpec(radius=0.0)
        with pytest.raises(DomainError):
            TubeSpec(mu_range=(0.0, 1.0))

    def test_membership(self):
        assert tube_contains((1.0, 1.1))
        assert not tube_contains((1.0, 2.0))
        assert tube_contains(GammaParams(1.0, 2.0))
        assert not tube_contains((1.0, 1.1), TubeSpec(radius=0.01))

    def test_certified_interval(self):
        result = certify_alpha_interval(0.2, (0.5, 2.0), samples=5)
        delta = result['delta']
        assert 0 < delta < 0.2
        assert result['alpha_interval'] == pytest.approx([1 - delta, 1 + delta])
        assert all(tube_contains((mu, a)) for mu in (0.5, 1.25, 2.0) for a in (1 - delta, 1 + delta))

    def test_interval_grows_with_radius(self):
        small = certify_alpha_interval(0.1, (0.5, 2.0), samples=5)['delta']
        large = certify_alpha_interval(0.3, (0.5, 2.0), samples=5)['delta']
        assert small < large

    def test_surface_grid(self):
        rows = immersion_surface_grid([0.5, 1.0], [0.9, 1.0, 3.0])
        assert len(rows) == 6
        assert [(r.mu, r.alpha) for r in rows[:3]] == [(0.5, 0.9), (0.5, 1.0), (0.5, 3.0)]
        for row in rows:
            assert row.beta == pytest.approx(row.alpha / row.mu)
            assert row.in_tube == (row.dist_to_exp_curve < 0.2)
        assert rows[1].dist_to_exp_curve < 1e-6
        assert not rows[2].in_tube
