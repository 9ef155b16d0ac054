"""
Dual-path verification
Checks every printed closed form against the numeric curvature pipeline and the quadrature
Fisher oracle, and collects entries that disagree at every test point as suspected errata.
"""
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from closed_forms import (SubmanifoldId, five_manifold_metric, mckay_metric,
                          mckay_report, submanifold_geometry)
from config import Tolerances
from distributions import FiveGammaParams, McKayParams
from errors import DomainError
from fisher_oracle import FAMILIES, QuadratureConfig, compare_fisher, fisher
from geometry_core import full_report, invert_metric
from immersion import gamma_metric_2d
from metric_fields import gamma_field, mckay_field, submanifold_field

logger = logging.getLogger(__name__)

STANDARD_GRID = [(a1, s, a2) for a1 in (0.5, 1.0, 2.0, 4.0) for s in (0.5, 1.0, 3.0)
                 for a2 in (0.75, 1.5, 3.0, 6.0)]


@dataclass
class ComparisonEntry:
    name: str
    printed: float
    pipeline: float
    abs_dev: float
    rel_dev: float
    agree: bool
    provenance: str = ''


@dataclass
class ComparisonReport:
    model: str
    point: tuple
    entries: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    @property
    def all_agree(self):
        return all(e.agree for e in self.entries)

    def disagreements(self):
        return [e for e in self.entries if not e.agree]

    def entry(self, name):
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)


def _entry(name, printed, pipeline, provenance, rel_tol, abs_tol):
    printed, pipeline = float(printed), float(pipeline)
    dev = abs(printed - pipeline)
    rel = dev / abs(pipeline) if pipeline != 0 else (0.0 if dev == 0 else float('inf'))
    return ComparisonEntry(name, printed, pipeline, dev, rel,
                           bool(dev <= max(abs_tol, rel_tol * abs(pipeline))), provenance)


def _matrix_entries(prefix, printed, pipeline, provenance, rel_tol, abs_tol):
    n = printed.shape[0]
    return [_entry(f"{prefix}{i + 1}{j + 1}", printed[i, j], pipeline[i, j], provenance, rel_tol, abs_tol)
            for i in range(n) for j in range(i, n)]


def _shared_entries(closed, numeric, rel_tol, abs_tol):
    prov = closed.provenance
    entries = _matrix_entries('ginv', closed.inverse_metric, numeric.inverse_metric,
                              prov.get('inverse_metric', ''), 0.0, Tolerances.inverse_abs)
    for key, value in closed.riemann.items():
        i, j, k, l = (int(ch) - 1 for ch in key)
        entries.append(_entry(f"R{key}", value, numeric.riemann_lowered[i, j, k, l],
                              prov.get(key, ''), rel_tol, abs_tol))
    entries += _matrix_entries('Ric', closed.ricci, numeric.ricci, prov.get('ricci', ''), rel_tol, abs_tol)
    entries.append(_entry('scalar', closed.scalar, numeric.scalar, prov.get('scalar', ''), rel_tol, abs_tol))
    for (i, j), value in closed.sectional.items():
        entries.append(_entry(f"sec{i + 1}{j + 1}", value, numeric.sectional[(i, j)],
                              prov.get('sectional', ''), rel_tol, abs_tol))
    for lam, value in closed.mean.items():
        entries.append(_entry(f"mean{lam + 1}", value, numeric.mean[lam], prov.get('mean', ''),
                              rel_tol, abs_tol))
    return entries


def compare_mckay(p, corrected=False, rel_tol=Tolerances.curvature_rel, abs_tol=Tolerances.curvature_abs):
    """
    Printed McKay objects against the curvature pipeline at one point

    Args:
        p: McKayParams
        corrected: Compare the repaired forms instead of the printed ones
        rel_tol: Relative agreement tolerance
        abs_tol: Absolute floor for values near zero

    Returns:
        ComparisonReport
    """
    closed = mckay_report(p, corrected)
    numeric = full_report(mckay_field(), p.as_array())
    report = ComparisonReport('mckay', closed.point, _shared_entries(closed, numeric, rel_tol, abs_tol),
                              list(closed.flags))
    _log_disagreements(report)
    return report


def compare_submanifold(tag, coords, corrected=False, rel_tol=Tolerances.curvature_rel,
                        abs_tol=Tolerances.curvature_abs):
    """Printed M1/M2/M3 metric, inverse, Christoffels and curvature against the pipeline."""
    tag = SubmanifoldId.parse(tag)
    closed = submanifold_geometry(tag, coords, corrected)
    mfield = submanifold_field(tag.value)
    numeric = full_report(mfield, closed.point)
    entries = _matrix_entries('g', closed.metric, mfield.metric_at(np.asarray(closed.point)),
                              closed.provenance['metric'], 0.0, 1e-12)
    for k, i, j in np.ndindex(2, 2, 2):
        if i <= j:
            entries.append(_entry(f"Gamma{k + 1}_{i + 1}{j + 1}", closed.christoffels[k, i, j],
                                  numeric.christoffels[k, i, j], closed.provenance['christoffels'],
                                  1e-8, abs_tol))
    entries += _shared_entries(closed, numeric, rel_tol, abs_tol)
    report = ComparisonReport(tag.value, closed.point, entries, list(closed.flags))
    _log_disagreements(report)
    return report


def _log_disagreements(report):
    for e in report.disagreements():
        logger.warning(f"{report.model} {e.name} at {report.point}: printed {e.printed:.12g}, "
                       f"pipeline {e.pipeline:.12g} ({e.provenance})")


@dataclass
class SuspectedErratum:
    model: str
    name: str
    provenance: str
    observations: list = field(default_factory=list)


@dataclass
class ErratumReport:
    points_checked: int
    errata: list = field(default_factory=list)
    intermittent: list = field(default_factory=list)

    def names(self):
        return sorted(f"{e.model}:{e.name}" for e in self.errata)

    def to_dict(self):
        return asdict(self)


def erratum_report(mckay_points=None, submanifold_points=None, corrected=False,
                   zero_floor=Tolerances.curvature_abs):
    """
    Entries that disagree with the pipeline at every point where the reference is not ~0

    Args:
        mckay_points: (alpha1, sigma12, alpha2) tuples; defaults to STANDARD_GRID
        submanifold_points: dict tag -> list of chart points; defaults to a small grid per tag
        corrected: Check the repaired forms
        zero_floor: Pipeline values below this magnitude do not count as evidence either way

    Returns:
        ErratumReport: errata lists persistent disagreements, intermittent the rest
    """
    mckay_points = STANDARD_GRID if mckay_points is None else mckay_points
    if submanifold_points is None:
        chart = [(x, y) for x in (0.5, 1.0, 3.0) for y in (0.5, 1.5, 4.0)]
        submanifold_points = {tag.value: chart for tag in SubmanifoldId}
    reports = [compare_mckay(McKayParams(*p), corrected) for p in mckay_points]
    for tag, points in submanifold_points.items():
        reports += [compare_submanifold(tag, q, corrected) for q in points]

    tally = {}
    for report in reports:
        for e in report.entries:
            if abs(e.pipeline) <= zero_floor and e.agree:
                continue
            key = (report.model, e.name)
            record = tally.setdefault(key, {'seen': 0, 'bad': [], 'provenance': e.provenance})
            record['seen'] += 1
            if not e.agree:
                record['bad'].append({'point': list(report.point), 'printed': e.printed,
                                      'pipeline': e.pipeline, 'rel_dev': e.rel_dev})
    result = ErratumReport(len(reports))
    for (model, name), record in sorted(tally.items()):
        if not record['bad']:
            continue
        suspect = SuspectedErratum(model, name, record['provenance'], record['bad'])
        target = result.errata if len(record['bad']) == record['seen'] else result.intermittent
        target.append(suspect)
    for e in result.errata:
        logger.warning(f"suspected erratum {e.model}:{e.name} ({e.provenance}), "
                       f"{len(e.observations)} points")
    return result


def _gamma_metric(theta):
    return gamma_field().metric_at(np.asarray(theta, dtype=float))


_CLOSED_METRICS = {
    'mckay': lambda t: mckay_metric(McKayParams(*t)),
    'mckay5': lambda t: five_manifold_metric(FiveGammaParams(*t)),
    'gamma': _gamma_metric,
    'loggamma': _gamma_metric,
    'gamma_natural': lambda t: gamma_metric_2d(*t),
}

_DEFAULT_TOL = {'mckay5': Tolerances.five_metric_abs}


def oracle_check(model, params, tol=None, cfg=None):
    """
    Closed-form Fisher metric against the quadrature oracle

    Args:
        model: 'mckay', 'mckay5', 'gamma', 'loggamma' or 'gamma_natural'
        params: Parameter point in the model's chart
        tol: Absolute tolerance (defaults from Tolerances)
        cfg: QuadratureConfig

    Returns:
        dict: closed, oracle, estimated_error, max_abs, max_rel, within_tol
    """
    if model not in _CLOSED_METRICS:
        raise DomainError(f"unknown model {model!r}", invariant=f"model in {sorted(_CLOSED_METRICS)}")
    tol = _DEFAULT_TOL.get(model, Tolerances.metric_abs) if tol is None else tol
    closed = _CLOSED_METRICS[model](tuple(params))
    oracle = fisher(FAMILIES[model], params, cfg)
    result = compare_fisher(closed, oracle, tol)
    result.update({'model': model, 'params': list(map(float, params)), 'closed': closed.tolist(),
                   'oracle': oracle.entries.tolist(), 'estimated_error': oracle.estimated_error})
    if not result['within_tol']:
        logger.warning(f"{model} at {tuple(params)}: closed form deviates from oracle by {result['max_abs']:.3e}")
    return result


def probe_alpha_near_two(alphas=(2.05, 2.1, 2.5), sigma12=1.0, cfg=None):
    """
    Printed five-parameter metric and oracle as alpha1 = alpha2 = alpha approaches 2

    Returns:
        list: dicts with alpha, printed and oracle (gamma1, gamma1) entries and the full deviation
    """
    cfg = cfg or QuadratureConfig()
    rows = []
    for alpha in alphas:
        theta = (alpha, alpha, sigma12, 0.0, 0.0)
        printed = five_manifold_metric(FiveGammaParams(*theta))
        oracle = fisher(FAMILIES['mckay5'], theta, cfg)
        rows.append({'alpha': float(alpha), 'printed_g44': float(printed[3, 3]),
                     'oracle_g44': float(oracle.entries[3, 3]),
                     'max_abs': float(np.max(np.abs(printed - oracle.entries))),
                     'max_rel': float(np.max(np.abs(printed - oracle.entries)
                                             / np.maximum(np.abs(oracle.entries), 1e-300)))})
        logger.info(f"alpha {alpha}: g44 printed {printed[3, 3]:.6g}, oracle {oracle.entries[3, 3]:.6g}")
    return rows


def inverse_identity_residual(metric, inverse):
    """max |G G^-1 - I|"""
    return float(np.max(np.abs(np.asarray(metric) @ np.asarray(inverse) - np.eye(len(metric)))))


def printed_inverse_vs_numeric(p):
    return float(np.max(np.abs(mckay_report(p).inverse_metric - invert_metric(mckay_metric(p)))))


if __name__ == '__main__':
    report = erratum_report()
    print(f"[Verification] {report.points_checked} points checked")
    for name in report.names():
        print(f"[Verification] suspected erratum {name}")
