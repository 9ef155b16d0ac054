"""Tests for geodesic integration, shooting and slice distances."""
import math

import numpy as np
import pytest

from distributions import McKayParams
from errors import ChartExitError, DomainError
from geodesy import (departure_from_independence, departure_from_randomness, distance_to_submanifold,
                     geodesic_distance, geodesic_energy_polyline, integrate_geodesic, shoot)
from metric_fields import euclidean_field, mckay_field, sphere_field


def great_circle(p, q):
    (t1, f1), (t2, f2) = p, q
    cos_d = math.cos(t1) * math.cos(t2) + math.sin(t1) * math.sin(t2) * math.cos(f2 - f1)
    return math.acos(min(1.0, max(-1.0, cos_d)))


class TestIntegration:

    def test_straight_line(self):
        path = integrate_geodesic(euclidean_field(2), (0.0, 0.0), (1.0, 2.0), steps=16)
        np.testing.assert_allclose(path.points[-1], [1.0, 2.0], atol=1e-14)
        assert path.speed_drift(euclidean_field(2)) == 0.0
        assert path.energy == pytest.approx(5.0)
        assert len(path.times) == path.step_count + 1

    def test_equator_is_a_geodesic(self):
        sphere = sphere_field()
        path = integrate_geodesic(sphere, (math.pi / 2, 0.0), (0.0, 1.0), t_end=2.0)
        np.testing.assert_allclose(path.points[-1], [math.pi / 2, 2.0], atol=1e-12)

    def test_speed_is_conserved(self):
        sphere = sphere_field(1.5)
        path = integrate_geodesic(sphere, (1.0, 0.2), (0.3, 0.8))
        assert path.speed_drift(sphere) < 1e-8

    def test_mckay_speed_is_conserved(self):
        field = mckay_field()
        path = integrate_geodesic(field, (2.0, 1.0, 3.0), (0.2, -0.1, 0.3), steps=64)
        assert path.speed_drift(field) < 1e-6

    def test_adaptive_refinement(self):
        path = integrate_geodesic(sphere_field(), (1.0, 0.0), (0.5, 1.0), steps=16, adaptive_tol=1e-9)
        assert path.step_count > 16

    def test_fourth_order_convergence(self, rng):
        field = mckay_field()
        v0 = rng.standard_normal(3)
        v0 *= 0.5 / np.linalg.norm(v0)
        ends = [integrate_geodesic(field, (1.0, 1.0, 1.0), v0, steps=n).points[-1] for n in (16, 32, 64)]
        ratio = np.linalg.norm(ends[0] - ends[1]) / np.linalg.norm(ends[1] - ends[2])
        assert 12.0 < ratio < 20.0

    def test_too_few_steps(self):
        with pytest.raises(DomainError):
            integrate_geodesic(euclidean_field(2), (0.0, 0.0), (1.0, 0.0), steps=8)

    def test_chart_exit(self):
        with pytest.raises(ChartExitError) as excinfo:
            integrate_geodesic(sphere_field(), (0.5, 0.0), (-2.0, 0.0))
        assert excinfo.value.last_time == pytest.approx(0.25, abs=0.01)
        assert excinfo.value.last_point[0] > 0


class TestTwoPoint:

    def test_euclidean_distance(self):
        result = geodesic_distance(euclidean_field(3), (0.0, 0.0, 0.0), (1.0, 2.0, 2.0))
        assert result.converged
        assert result.distance == pytest.approx(3.0)

    def test_zero_distance(self):
        result = geodesic_distance(mckay_field(), (2.0, 1.0, 3.0), (2.0, 1.0, 3.0))
        assert result.distance == 0.0
        assert result.converged

    @pytest.mark.parametrize('q', [(1.2, 0.5), (0.8, -0.4), (1.5, 0.9)])
    def test_sphere_distance(self, q):
        p = (1.0, 0.0)
        result = shoot(sphere_field(), p, q)
        assert result.converged
        assert result.distance == pytest.approx(great_circle(p, q), rel=1e-7)

    def test_outside_chart(self):
        with pytest.raises(DomainError):
            geodesic_distance(mckay_field(), (1.0, 1.0, 1.0), (1.0, -1.0, 1.0))

    @pytest.mark.slow
    def test_mckay_symmetry(self):
        field = mckay_field()
        p, q = (1.0, 1.0, 1.0), (1.5, 1.2, 2.0)
        forward = geodesic_distance(field, p, q)
        backward = geodesic_distance(field, q, p)
        assert forward.converged and backward.converged
        assert forward.distance == pytest.approx(backward.distance, rel=1e-6)

    @pytest.mark.slow
    def test_triangle_inequality(self):
        field = mckay_field()
        a, b, c = (1.0, 1.0, 1.0), (1.5, 1.2, 2.0), (2.0, 0.8, 1.5)
        ab = geodesic_distance(field, a, b).distance
        bc = geodesic_distance(field, b, c).distance
        ac = geodesic_distance(field, a, c).distance
        assert ac <= ab + bc + 1e-8


class TestPolyline:

    def test_euclidean(self):
        result = geodesic_energy_polyline(euclidean_field(2), (0.0, 0.0), (3.0, 4.0), nodes=8)
        assert result.distance == pytest.approx(5.0, rel=1e-8)
        assert result.method == 'polyline'
        assert result.polyline.shape == (9, 2)

    def test_sphere_matches_great_circle(self):
        p, q = (1.0, 0.0), (1.2, 0.5)
        result = geodesic_energy_polyline(sphere_field(), p, q, nodes=32)
        assert result.distance == pytest.approx(great_circle(p, q), rel=1e-3)

    @pytest.mark.slow
    def test_agrees_with_shooting(self):
        field = mckay_field()
        p, q = (1.0, 1.0, 1.0), (1.5, 1.2, 2.0)
        shot = shoot(field, p, q)
        poly = geodesic_energy_polyline(field, p, q, nodes=32)
        assert poly.distance == pytest.approx(shot.distance, rel=1e-3)


class TestSlices:

    def test_distance_to_hyperplane(self):
        found = distance_to_submanifold(euclidean_field(3), (1.0, 2.0, 3.0), 0, 0.0,
                                        [(-5.0, 5.0), (-5.0, 5.0)], grid=5, steps=16)
        assert found.distance == pytest.approx(1.0, abs=1e-6)
        np.testing.assert_allclose(found.foot, [0.0, 2.0, 3.0], atol=1e-3)
        assert not found.boundary_minimum
        assert found.evaluations > 25

    def test_box_edge_is_reported(self):
        found = distance_to_submanifold(euclidean_field(2), (1.0, 2.0), 0, 0.0, [(-1.0, 1.0)],
                                        grid=5, steps=16)
        assert found.boundary_minimum
        assert found.foot[1] == pytest.approx(1.0)

    def test_bad_box(self):
        with pytest.raises(DomainError):
            distance_to_submanifold(euclidean_field(3), (1.0, 2.0, 3.0), 0, 0.0, [(1.0, -1.0), (0.0, 1.0)])

    def test_point_on_slice(self):
        found = departure_from_randomness(McKayParams(1.0, 2.0, 3.0))
        assert found.distance == 0.0
        assert 'alpha1 = 1' in found.label

    def test_independence_window_label(self):
        found = departure_from_independence(McKayParams(2.0, 1.0, 50.0))
        assert found.distance == 0.0
        assert found.label.startswith('constructed window')
        assert found.extras['rho_at_foot'] == pytest.approx(math.sqrt(2.0 / 52.0))

    @pytest.mark.slow
    def test_departure_from_randomness(self):
        found = departure_from_randomness(McKayParams(1.5, 1.0, 2.0), grid=3, steps=64)
        assert 0 < found.distance < geodesic_distance(mckay_field(), (1.5, 1.0, 2.0), (1.0, 1.0, 2.0),
                                                      steps=64).distance + 1e-6
        assert found.foot[0] == 1.0
