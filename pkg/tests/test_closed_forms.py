"""Tests for the printed closed forms and their limits."""
import math

import numpy as np
import pytest

from closed_forms import (RIEMANN_KEYS, SubmanifoldId, five_manifold_metric, mckay_mean,
                          mckay_metric, mckay_metric_inverse, mckay_report,
                          mckay_riemann_components, mckay_ricci, mckay_scalar,
                          mckay_scalar_along_ray, mckay_scalar_at, mckay_scalar_ray_limit,
                          mckay_sectional, m3_scalar_surface, rho_maps, scalar_vs_rho_curve,
                          submanifold_correlation, submanifold_geometry, submanifold_params)
from distributions import FiveGammaParams, McKayParams
from errors import DomainError

ONES = McKayParams(1.0, 1.0, 1.0)


class TestMcKayAtOnes:

    def test_riemann(self):
        r = mckay_riemann_components(ONES)
        assert set(r) == set(RIEMANN_KEYS)
        for key in ('1212', '1213', '2323'):
            assert r[key] == pytest.approx(0.1532760144, rel=1e-9)
        assert r['1223'] == pytest.approx(0.0797045655, rel=1e-9)
        assert r['1323'] == pytest.approx(0.0797045655, rel=1e-9)
        assert r['1313'] == pytest.approx(0.3683291761, rel=1e-9)

    def test_ricci(self):
        expected = np.array([
            [-0.5386452717, 0.0, 0.2607657286],
            [0.0, -0.2557111316, -0.2557111316],
            [0.2607657286, -0.2557111316, -0.7943564033],
        ])
        np.testing.assert_allclose(mckay_ricci(ONES), expected, atol=1e-9)

    def test_scalar_sectional_mean(self):
        assert mckay_scalar(ONES) == pytest.approx(-1.428270917, rel=1e-9)
        sec = mckay_sectional(ONES)
        assert sec[(0, 1)] == pytest.approx(-0.2677464473, rel=1e-9)
        assert sec[(0, 2)] == pytest.approx(-0.2255065933, rel=1e-9)
        assert sec[(1, 2)] == pytest.approx(-0.2677464473, rel=1e-9)
        mean = mckay_mean(ONES)
        assert mean[0] == pytest.approx(-0.2352298212, rel=1e-9)
        assert mean[1] == pytest.approx(-0.2557111316, rel=1e-9)
        assert mean[2] == pytest.approx(-0.2414553930, rel=1e-9)

    def test_inverse(self):
        inverse = mckay_metric_inverse(ONES)
        assert inverse[0, 2] == pytest.approx(0.471320, abs=1e-6)
        np.testing.assert_allclose(inverse @ mckay_metric(ONES), np.eye(3), atol=1e-12)


class TestMcKayElsewhere:

    def test_values_at_two_one_three(self):
        p = McKayParams(2.0, 1.0, 3.0)
        assert mckay_scalar(p) == pytest.approx(-1.503857415, rel=1e-9)
        assert mckay_riemann_components(p)['1212'] == pytest.approx(0.1453168407, rel=1e-9)
        assert mckay_mean(p)[2] == pytest.approx(-0.2544848371, rel=1e-9)

    @pytest.mark.parametrize('point,printed,true', [
        ((2.0, 1.0, 3.0), 0.0127196678, 0.0207714344),
        ((0.5, 2.0, 4.0), None, 0.0010480432),
        ((4.0, 0.5, 1.0), None, 0.19368991),
    ])
    def test_r1323_repair(self, point, printed, true):
        p = McKayParams(*point)
        assert mckay_riemann_components(p, corrected=True)['1323'] == pytest.approx(true, rel=1e-7)
        if printed is not None:
            assert mckay_riemann_components(p)['1323'] == pytest.approx(printed, rel=1e-8)

    def test_repair_is_invisible_on_the_diagonal(self):
        p = McKayParams(1.7, 0.4, 1.7)
        assert (mckay_riemann_components(p)['1323']
                == pytest.approx(mckay_riemann_components(p, corrected=True)['1323'], rel=1e-14))

    @pytest.mark.parametrize('point', [(0.5, 0.5, 0.75), (2.0, 3.0, 6.0), (4.0, 1.0, 1.5)])
    def test_inverse_identity(self, point):
        p = McKayParams(*point)
        np.testing.assert_allclose(mckay_metric_inverse(p) @ mckay_metric(p), np.eye(3), atol=1e-9)

    def test_sigma_free_quantities(self):
        values = [mckay_scalar(McKayParams(2.0, s, 3.0)) for s in (0.01, 1.0, 100.0)]
        assert max(values) - min(values) < 1e-14
        means = [mckay_mean(McKayParams(2.0, s, 3.0))[1] for s in (0.01, 100.0)]
        assert means[0] == pytest.approx(means[1], rel=1e-12)

    def test_report(self):
        report = mckay_report(McKayParams(2.0, 1.0, 3.0), corrected=True)
        assert report.model == 'mckay'
        assert 'repaired' in report.provenance['1323']
        assert report.flags == []
        assert report.scalar == pytest.approx(-1.503857415, rel=1e-9)


class TestScalarLimits:

    def test_scalar_at(self):
        assert mckay_scalar_at(1.0, 1.0) == pytest.approx(-1.428270917, rel=1e-9)

    @pytest.mark.parametrize('eps,expected', [(0.1, -0.8923916), (0.01, -0.7649357),
                                              (0.001, -0.7514994), (1e-4, -0.7501500)])
    def test_diagonal_approach(self, eps, expected):
        assert mckay_scalar_at(eps, eps) == pytest.approx(expected, abs=1e-6)

    @pytest.mark.parametrize('k', [0.25, 1.0, 4.0])
    def test_ray_limit(self, k):
        expected = -(k ** 2 + 4 * k + 1) / (2 * (1 + k) ** 2)
        assert mckay_scalar_ray_limit(k) == pytest.approx(expected)
        (eps, value), = mckay_scalar_along_ray(k, [1e-4])
        assert eps == 1e-4
        assert value == pytest.approx(expected, abs=1e-3)

    def test_diagonal_limit_is_three_quarters(self):
        assert mckay_scalar_ray_limit(1.0) == pytest.approx(-0.75)

    def test_limit_depends_on_direction(self):
        assert mckay_scalar_at(1e-3, 1e-6) == pytest.approx(-0.501998, abs=1e-5)
        assert mckay_scalar_ray_limit(1e-6) == pytest.approx(-0.5, abs=1e-5)

    def test_bad_slope(self):
        with pytest.raises(DomainError):
            mckay_scalar_ray_limit(0.0)


class TestFiveManifold:

    def test_symmetric_and_location_free(self):
        g = five_manifold_metric(FiveGammaParams(3.0, 4.0, 1.5, 0.0, 0.0))
        shifted = five_manifold_metric(FiveGammaParams(3.0, 4.0, 1.5, 2.0, 7.0))
        np.testing.assert_array_equal(g, g.T)
        np.testing.assert_array_equal(g, shifted)

    def test_shape_sigma_block_matches_mckay(self):
        g = five_manifold_metric(FiveGammaParams(3.0, 4.0, 1.5))
        mckay = mckay_metric(McKayParams(3.0, 1.5, 4.0))
        order = [0, 2, 1]
        np.testing.assert_allclose(g[:3, :3], mckay[np.ix_(order, order)], rtol=1e-14)

    def test_requires_shapes_above_two(self):
        with pytest.raises(DomainError):
            five_manifold_metric(FiveGammaParams.unchecked(1.5, 4.0, 1.0))


class TestSubmanifolds:

    def test_parse(self):
        assert SubmanifoldId.parse('m2') is SubmanifoldId.M2
        with pytest.raises(DomainError):
            SubmanifoldId.parse('M7')

    def test_m1_metric_at_ones(self):
        report = submanifold_geometry('M1', (1.0, 1.0))
        np.testing.assert_allclose(report.metric, [[0.5, 0.5], [0.5, math.pi ** 2 / 6]], atol=1e-14)
        np.testing.assert_allclose(report.inverse_metric @ report.metric, np.eye(2), atol=1e-12)

    @pytest.mark.parametrize('alpha2,expected', [(1.0, -0.30163974), (3.0, -0.32955225),
                                                 (0.7, -0.27803609)])
    def test_m1_scalar(self, alpha2, expected):
        for s in (0.2, 1.0, 5.0):
            assert submanifold_geometry('M1', (s, alpha2)).scalar == pytest.approx(expected, abs=1e-8)

    @pytest.mark.parametrize('coords,expected', [((1.0, 1.0), -0.0791185), ((2.0, 3.0), -0.0289737),
                                                 ((0.5, 4.0), -0.1291823), ((4.0, 0.5), 0.0108141)])
    def test_m3_scalar(self, coords, expected):
        assert submanifold_geometry('M3', coords).scalar == pytest.approx(expected, abs=1e-7)

    @pytest.mark.parametrize('coords,printed,true', [((1.0, 1.0), -0.0381788, -0.0452927),
                                                     ((2.0, 3.0), -0.0142729, -0.0066268)])
    def test_m3_ricci_repair(self, coords, printed, true):
        assert submanifold_geometry('M3', coords).ricci[0, 0] == pytest.approx(printed, abs=1e-7)
        repaired = submanifold_geometry('M3', coords, corrected=True)
        assert repaired.ricci[0, 0] == pytest.approx(true, abs=1e-7)
        assert 'repaired' in repaired.provenance['ricci']

    @pytest.mark.parametrize('tag', ['M1', 'M2'])
    def test_repair_only_touches_m3(self, tag):
        printed = submanifold_geometry(tag, (1.5, 2.5))
        repaired = submanifold_geometry(tag, (1.5, 2.5), corrected=True)
        np.testing.assert_array_equal(repaired.ricci, printed.ricci)
        assert repaired.scalar == printed.scalar
        assert repaired.provenance == printed.provenance

    @pytest.mark.parametrize('tag', ['M1', 'M2', 'M3'])
    def test_two_dimensional_identities(self, tag):
        report = submanifold_geometry(tag, (1.5, 2.5), corrected=True)
        det = np.linalg.det(report.metric)
        np.testing.assert_allclose(report.ricci, -report.riemann['1212'] / det * report.metric, rtol=1e-9)
        assert report.scalar == pytest.approx(-2 * report.riemann['1212'] / det, rel=1e-9)
        assert report.sectional[(0, 1)] == pytest.approx(report.mean[0], rel=1e-9)

    def test_christoffel_symmetry(self):
        gamma = submanifold_geometry('M2', (2.0, 0.5)).christoffels
        np.testing.assert_array_equal(gamma, gamma.transpose(0, 2, 1))

    def test_bad_coords(self):
        with pytest.raises(DomainError):
            submanifold_geometry('M1', (1.0, -2.0))
        with pytest.raises(DomainError):
            submanifold_geometry('M1', (1.0, 2.0, 3.0))

    def test_params_and_correlation(self):
        p = submanifold_params('M1', (2.0, 3.0))
        assert (p.alpha1, p.sigma12, p.alpha2) == (1.0, 2.0, 3.0)
        assert submanifold_correlation('M1', (2.0, 3.0)) == pytest.approx(0.5)


class TestRhoCurves:

    def test_rho_maps(self):
        assert rho_maps('M1', 0.5) == pytest.approx(3.0)
        assert rho_maps('M2', 0.5) == pytest.approx(1.0 / 3.0)
        with pytest.raises(DomainError):
            rho_maps('M3', 0.5)
        with pytest.raises(DomainError):
            rho_maps('M1', 1.0)

    def test_map_inverts_correlation(self):
        for rho in (0.1, 0.5, 0.9):
            assert submanifold_correlation('M1', (1.0, rho_maps('M1', rho))) == pytest.approx(rho)
            assert submanifold_correlation('M2', (rho_maps('M2', rho), 1.0)) == pytest.approx(rho)

    def test_m1_curve(self):
        curve = dict(scalar_vs_rho_curve('M1', [0.01, 0.05, 0.95]))
        assert curve[0.01] == pytest.approx(-0.3333333330, abs=1e-9)
        assert curve[0.05] == pytest.approx(-0.33333315, abs=1e-8)
        assert curve[0.95] == pytest.approx(-0.0916729, abs=1e-7)

    def test_m1_curve_increasing(self):
        grid = np.linspace(0.05, 0.95, 19)
        values = [r for _, r in scalar_vs_rho_curve('M1', grid)]
        assert np.all(np.diff(values) > 0)
        assert all(r > -1.0 / 3.0 for r in values)

    def test_m3_surface_shape(self):
        surface = m3_scalar_surface([1.0, 2.0], [1.0, 3.0, 5.0])
        assert surface.shape == (2, 3)
        assert surface[0, 0] == pytest.approx(-0.0791185, abs=1e-7)
        assert surface[1, 1] == pytest.approx(-0.0289737, abs=1e-7)
