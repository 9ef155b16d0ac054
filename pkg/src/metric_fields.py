"""
Metric fields with analytic first derivatives
McKay 3-manifold, its submanifolds M1/M2/M3, the five-parameter manifold, the gamma
2-manifold in two charts, plus flat and spherical fixtures for the curvature pipeline.
"""
import math

import numpy as np

from errors import DomainError
from geometry_core import MetricField
from special_functions import tetragamma, trigamma

SUBMANIFOLD_TAGS = ('M1', 'M2', 'M3')

# free coordinates (indices into the McKay chart) and the fixed coordinate for each tag
_SUBMANIFOLD_CHARTS = {
    'M1': ((1, 2), 0),      # alpha1 = 1, chart (sigma12, alpha2)
    'M2': ((0, 1), 2),      # alpha2 = 1, chart (alpha1, sigma12)
    'M3': ((0, 2), 1),      # sigma12 = 1, chart (alpha1, alpha2)
}
_MCKAY_NAMES = ('alpha1', 'sigma12', 'alpha2')


def _positive(p):
    return bool(np.all(np.isfinite(p)) and np.all(p > 0))


def _sym(m, i, j, value):
    m[i, j] = m[j, i] = value


def mckay_metric_matrix(point):
    a1, s, a2 = point
    return np.array([
        [(-3 * a1 + a2) / (4 * a1 ** 2) + trigamma(a1), (a1 - a2) / (4 * a1 * s), -1 / (2 * a1)],
        [(a1 - a2) / (4 * a1 * s), (a1 + a2) / (4 * s ** 2), 1 / (2 * s)],
        [-1 / (2 * a1), 1 / (2 * s), trigamma(a2)],
    ])


def mckay_metric_derivs(point):
    a1, s, a2 = point
    d = np.zeros((3, 3, 3))
    d[0, 0, 0] = tetragamma(a1) + (3 * a1 - 2 * a2) / (4 * a1 ** 3)
    _sym(d[0], 0, 1, a2 / (4 * a1 ** 2 * s))
    _sym(d[0], 0, 2, 1 / (2 * a1 ** 2))
    d[0, 1, 1] = 1 / (4 * s ** 2)

    _sym(d[1], 0, 1, -(a1 - a2) / (4 * a1 * s ** 2))
    d[1, 1, 1] = -(a1 + a2) / (2 * s ** 3)
    _sym(d[1], 1, 2, -1 / (2 * s ** 2))

    d[2, 0, 0] = 1 / (4 * a1 ** 2)
    _sym(d[2], 0, 1, -1 / (4 * a1 * s))
    d[2, 1, 1] = 1 / (4 * s ** 2)
    d[2, 2, 2] = tetragamma(a2)
    return d


def mckay_field():
    return MetricField(3, 'mckay', _MCKAY_NAMES, _positive, mckay_metric_matrix, mckay_metric_derivs)


def submanifold_chart(tag):
    if tag not in _SUBMANIFOLD_CHARTS:
        raise DomainError(f"unknown submanifold {tag!r}", invariant='tag in {M1, M2, M3}')
    return _SUBMANIFOLD_CHARTS[tag]


def lift_to_mckay(tag, coords):
    """Embed 2-D submanifold chart coordinates into (alpha1, sigma12, alpha2)."""
    free, fixed = submanifold_chart(tag)
    point = np.ones(3)
    point[list(free)] = np.asarray(coords, dtype=float)
    point[fixed] = 1.0
    return point


def submanifold_field(tag):
    """Induced metric on M1 (alpha1=1), M2 (alpha2=1) or M3 (sigma12=1)."""
    free, _ = submanifold_chart(tag)
    idx = np.ix_(free, free)

    def metric_at(q):
        return mckay_metric_matrix(lift_to_mckay(tag, q))[idx]

    def derivs_at(q):
        d = mckay_metric_derivs(lift_to_mckay(tag, q))
        return np.array([d[m][idx] for m in free])

    names = tuple(_MCKAY_NAMES[i] for i in free)
    return MetricField(2, tag, names, _positive, metric_at, derivs_at)


def five_metric_matrix(point):
    a1, a2, s = point[:3]
    c = math.sqrt(a1 / s)
    c2 = a1 / s
    g = np.zeros((5, 5))
    g[0, 0] = trigamma(a1) + (-3 * a1 + a2) / (4 * a1 ** 2)
    _sym(g, 0, 1, -1 / (2 * a1))
    _sym(g, 0, 2, (a1 - a2) / (4 * a1 * s))
    _sym(g, 0, 3, c / (a1 - 1))
    _sym(g, 0, 4, -1 / (2 * math.sqrt(a1 * s)))
    g[1, 1] = trigamma(a2)
    _sym(g, 1, 2, 1 / (2 * s))
    _sym(g, 1, 3, c / (1 - a2))
    _sym(g, 1, 4, c / (a2 - 1))
    g[2, 2] = (a1 + a2) / (4 * s ** 2)
    _sym(g, 2, 4, c / (2 * s))
    g[3, 3] = c2 / (a1 - 2) + c2 / (a2 - 2)
    _sym(g, 3, 4, -c2 / (a2 - 2))
    g[4, 4] = c2 / (a2 - 2)
    return g


def five_metric_derivs(point):
    a1, a2, s = point[:3]
    c = math.sqrt(a1 / s)
    c2 = a1 / s
    root = math.sqrt(a1 * s)
    d = np.zeros((5, 5, 5))

    # d/d alpha1
    d[0, 0, 0] = tetragamma(a1) + (3 * a1 - 2 * a2) / (4 * a1 ** 3)
    _sym(d[0], 0, 1, 1 / (2 * a1 ** 2))
    _sym(d[0], 0, 2, a2 / (4 * a1 ** 2 * s))
    _sym(d[0], 0, 3, -(a1 + 1) / (2 * root * (a1 - 1) ** 2))
    _sym(d[0], 0, 4, 1 / (4 * a1 * root))
    _sym(d[0], 1, 3, -c / (2 * a1 * (a2 - 1)))
    _sym(d[0], 1, 4, c / (2 * a1 * (a2 - 1)))
    d[0, 2, 2] = 1 / (4 * s ** 2)
    _sym(d[0], 2, 4, c / (4 * a1 * s))
    d[0, 3, 3] = -2 / (s * (a1 - 2) ** 2) + 1 / (s * (a2 - 2))
    _sym(d[0], 3, 4, -1 / (s * (a2 - 2)))
    d[0, 4, 4] = 1 / (s * (a2 - 2))

    # d/d alpha2
    d[1, 0, 0] = 1 / (4 * a1 ** 2)
    _sym(d[1], 0, 2, -1 / (4 * a1 * s))
    d[1, 1, 1] = tetragamma(a2)
    _sym(d[1], 1, 3, c / (a2 - 1) ** 2)
    _sym(d[1], 1, 4, -c / (a2 - 1) ** 2)
    d[1, 2, 2] = 1 / (4 * s ** 2)
    d[1, 3, 3] = -c2 / (a2 - 2) ** 2
    _sym(d[1], 3, 4, c2 / (a2 - 2) ** 2)
    d[1, 4, 4] = -c2 / (a2 - 2) ** 2

    # d/d sigma12
    _sym(d[2], 0, 2, -(a1 - a2) / (4 * a1 * s ** 2))
    _sym(d[2], 0, 3, -c / (2 * s * (a1 - 1)))
    _sym(d[2], 0, 4, 1 / (4 * s * root))
    _sym(d[2], 1, 2, -1 / (2 * s ** 2))
    _sym(d[2], 1, 3, c / (2 * s * (a2 - 1)))
    _sym(d[2], 1, 4, -c / (2 * s * (a2 - 1)))
    d[2, 2, 2] = -(a1 + a2) / (2 * s ** 3)
    _sym(d[2], 2, 4, -3 * c / (4 * s ** 2))
    d[2, 3, 3] = -(c2 / (a1 - 2) + c2 / (a2 - 2)) / s
    _sym(d[2], 3, 4, c2 / ((a2 - 2) * s))
    d[2, 4, 4] = -c2 / ((a2 - 2) * s)
    # the metric does not depend on gamma1, gamma2
    return d


def _five_domain(p):
    return bool(np.all(np.isfinite(p)) and p[0] > 2 and p[1] > 2 and p[2] > 0
                and p[3] >= 0 and p[4] >= 0)


def _five_stencil(p):
    # location coordinates may be differenced across 0: the metric is constant in them
    return bool(np.all(np.isfinite(p)) and p[0] > 2 and p[1] > 2 and p[2] > 0)


def five_manifold_field():
    return MetricField(5, 'mckay5', ('alpha1', 'alpha2', 'sigma12', 'gamma1', 'gamma2'),
                       _five_domain, five_metric_matrix, five_metric_derivs, _five_stencil)


def gamma_field():
    """Gamma family in (alpha, beta), beta the mean: diag(psi'(alpha) - 1/alpha, alpha/beta^2)."""
    def metric_at(p):
        a, b = p
        return np.array([[trigamma(a) - 1 / a, 0.0], [0.0, a / b ** 2]])

    def derivs_at(p):
        a, b = p
        return np.array([[[tetragamma(a) + 1 / a ** 2, 0.0], [0.0, 1 / b ** 2]],
                         [[0.0, 0.0], [0.0, -2 * a / b ** 3]]])

    return MetricField(2, 'gamma', ('alpha', 'beta'), _positive, metric_at, derivs_at)


def gamma_natural_field():
    """Gamma family in (mu, alpha), mu = alpha/beta the rate: [[alpha/mu^2, -1/mu], [-1/mu, psi'(alpha)]]."""
    def metric_at(p):
        mu, a = p
        return np.array([[a / mu ** 2, -1 / mu], [-1 / mu, trigamma(a)]])

    def derivs_at(p):
        mu, a = p
        return np.array([[[-2 * a / mu ** 3, 1 / mu ** 2], [1 / mu ** 2, 0.0]],
                         [[1 / mu ** 2, 0.0], [0.0, tetragamma(a)]]])

    return MetricField(2, 'gamma_natural', ('mu', 'alpha'), _positive, metric_at, derivs_at)


def euclidean_field(dim):
    return MetricField(dim, f"euclidean{dim}", tuple(f"x{i + 1}" for i in range(dim)),
                       lambda p: bool(np.all(np.isfinite(p))),
                       lambda p: np.eye(dim), lambda p: np.zeros((dim, dim, dim)))


def sphere_field(radius=1.0):
    """Round sphere in (theta, phi), theta in (0, pi): scalar curvature 2/radius^2."""
    r2 = radius ** 2

    def metric_at(p):
        return np.diag([r2, r2 * math.sin(p[0]) ** 2])

    def derivs_at(p):
        d = np.zeros((2, 2, 2))
        d[0, 1, 1] = 2 * r2 * math.sin(p[0]) * math.cos(p[0])
        return d

    return MetricField(2, 'sphere', ('theta', 'phi'),
                       lambda p: bool(0 < p[0] < math.pi and np.isfinite(p[1])),
                       metric_at, derivs_at)


FIELDS = {
    'mckay': mckay_field,
    'mckay5': five_manifold_field,
    'gamma': gamma_field,
    'gamma_natural': gamma_natural_field,
}
