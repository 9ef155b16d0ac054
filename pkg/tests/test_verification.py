"""Tests for printed-vs-pipeline comparisons and the erratum report."""
import numpy as np
import pytest

from distributions import McKayParams
from errors import DomainError
from verification import (STANDARD_GRID, compare_mckay, compare_submanifold, erratum_report,
                          inverse_identity_residual, oracle_check, printed_inverse_vs_numeric,
                          probe_alpha_near_two)


@pytest.fixture(scope='module')
def printed_errata():
    return erratum_report()


class TestCompareMcKay:

    def test_agrees_on_the_diagonal(self):
        report = compare_mckay(McKayParams(1.0, 1.0, 1.0))
        assert report.all_agree, [e.name for e in report.disagreements()]

    def test_printed_r1323_disagrees_off_diagonal(self):
        report = compare_mckay(McKayParams(2.0, 1.0, 3.0))
        assert [e.name for e in report.disagreements()] == ['R1323']
        entry = report.entry('R1323')
        assert entry.printed == pytest.approx(0.0127196678, rel=1e-8)
        assert entry.pipeline == pytest.approx(0.0207714344, rel=1e-6)

    def test_repaired_forms_agree(self):
        report = compare_mckay(McKayParams(2.0, 1.0, 3.0), corrected=True)
        assert report.all_agree

    def test_entry_names(self):
        names = {e.name for e in compare_mckay(McKayParams(1.0, 1.0, 1.0)).entries}
        assert {'ginv11', 'ginv13', 'R1212', 'R2323', 'Ric11', 'Ric33', 'scalar', 'sec12', 'mean3'} <= names
        with pytest.raises(KeyError):
            compare_mckay(McKayParams(1.0, 1.0, 1.0)).entry('R9999')


class TestCompareSubmanifold:

    @pytest.mark.parametrize('tag', ['M1', 'M2'])
    def test_m1_m2_agree(self, tag):
        report = compare_submanifold(tag, (1.5, 2.5))
        assert report.all_agree, [e.name for e in report.disagreements()]

    def test_m3_ricci_misprint(self):
        report = compare_submanifold('M3', (1.0, 1.0))
        bad = {e.name for e in report.disagreements()}
        assert {'Ric11', 'mean1'} == bad
        assert compare_submanifold('M3', (1.0, 1.0), corrected=True).all_agree

    def test_christoffels_checked(self):
        names = {e.name for e in compare_submanifold('M2', (2.0, 0.5)).entries}
        assert {'g11', 'g12', 'g22', 'Gamma1_11', 'Gamma2_12', 'Gamma2_22'} <= names


class TestErratumReport:

    def test_default_grid_avoids_equal_shapes(self):
        assert len(STANDARD_GRID) == 48
        assert all(a1 != a2 for a1, _, a2 in STANDARD_GRID)

    def test_printed_errata(self, printed_errata):
        assert printed_errata.points_checked == 48 + 3 * 9
        assert printed_errata.names() == ['M3:Ric11', 'M3:mean1', 'mckay:R1323']
        r1323 = next(e for e in printed_errata.errata if e.name == 'R1323')
        assert len(r1323.observations) == 48

    def test_report_serializes(self, printed_errata):
        payload = printed_errata.to_dict()
        assert payload['points_checked'] == printed_errata.points_checked
        assert {e['name'] for e in payload['errata']} == {'R1323', 'Ric11', 'mean1'}

    def test_corrected_forms_are_clean(self):
        report = erratum_report(mckay_points=STANDARD_GRID[::5],
                                submanifold_points={'M3': [(1.0, 1.0), (2.0, 3.0), (0.5, 4.0)]},
                                corrected=True)
        assert report.errata == []

    def test_single_point_on_diagonal(self):
        report = erratum_report(mckay_points=[(1.0, 1.0, 1.0)], submanifold_points={})
        assert report.errata == []


class TestOracleCheck:

    @pytest.mark.parametrize('model,params', [('gamma', (2.0, 1.0)), ('gamma_natural', (2.0, 3.0)),
                                              ('loggamma', (1.5, 2.0)), ('mckay', (2.0, 1.0, 3.0))])
    def test_closed_forms_match(self, model, params):
        result = oracle_check(model, params)
        assert result['within_tol'], result['max_abs']
        assert result['model'] == model
        assert np.asarray(result['closed']).shape == np.asarray(result['oracle']).shape

    def test_five_manifold(self):
        assert oracle_check('mckay5', (3.0, 4.0, 1.0, 0.0, 0.5))['within_tol']

    def test_tight_tolerance_flags(self):
        assert not oracle_check('mckay', (2.0, 1.0, 3.0), tol=1e-30)['within_tol']

    def test_unknown_model(self):
        with pytest.raises(DomainError):
            oracle_check('weibull', (1.0, 1.0))

    @pytest.mark.slow
    def test_probe_near_two(self):
        rows = probe_alpha_near_two(alphas=(2.1, 2.5))
        assert [r['alpha'] for r in rows] == [2.1, 2.5]
        for row in rows:
            alpha = row['alpha']
            assert row['printed_g44'] == pytest.approx(2 * alpha / (alpha - 2), rel=1e-12)
        assert rows[1]['max_abs'] < 1e-4


class TestInverses:

    def test_residual(self):
        g = np.array([[2.0, 1.0], [1.0, 3.0]])
        assert inverse_identity_residual(g, np.linalg.inv(g)) < 1e-14
        assert inverse_identity_residual(g, np.eye(2)) == pytest.approx(2.0)

    @pytest.mark.parametrize('point', [(1.0, 1.0, 1.0), (0.5, 3.0, 6.0), (4.0, 0.5, 0.75)])
    def test_printed_inverse(self, point):
        assert printed_inverse_vs_numeric(McKayParams(*point)) < 1e-9
