"""
Closed-form geometry of the McKay manifold, its submanifolds and the five-parameter manifold
Every function evaluates a printed formula term by term. Formulas with a confirmed printing
error can be evaluated in repaired form with corrected=True; the provenance note of each
entry says which form was used.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from config import PipelineDefaults
from distributions import McKayParams, mckay_correlation
from errors import DomainError
from metric_fields import five_metric_matrix, lift_to_mckay, mckay_metric_matrix
from special_functions import tetragamma, trigamma

logger = logging.getLogger(__name__)

RIEMANN_KEYS = ('1212', '1213', '1223', '1313', '1323', '2323')


class SubmanifoldId(Enum):
    M1 = 'M1'   # alpha1 = 1, chart (sigma12, alpha2)
    M2 = 'M2'   # alpha2 = 1, chart (alpha1, sigma12)
    M3 = 'M3'   # sigma12 = 1, chart (alpha1, alpha2)

    @classmethod
    def parse(cls, tag):
        if isinstance(tag, cls):
            return tag
        try:
            return cls(str(tag).upper())
        except ValueError:
            raise DomainError(f"unknown submanifold {tag!r}", invariant='tag in {M1, M2, M3}') from None


@dataclass
class ClosedFormReport:
    """Geometry from printed formulas; keys of sectional/mean are 0-based axis indices."""
    model: str
    point: tuple
    metric: np.ndarray
    inverse_metric: np.ndarray
    riemann: dict
    ricci: np.ndarray
    scalar: float
    sectional: dict = field(default_factory=dict)
    mean: dict = field(default_factory=dict)
    christoffels: np.ndarray = None
    provenance: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)


def _flag_denominator(flags, name, value, scale, point):
    if abs(value) < PipelineDefaults.singular_threshold * max(scale, 1e-300):
        message = f"near-singular denominator {name} = {value:.3e} at {point}"
        logger.warning(message)
        flags.append(message)


def _polygammas(a1, a2):
    return trigamma(a1), trigamma(a2), tetragamma(a1), tetragamma(a2)


def mckay_metric(p):
    return mckay_metric_matrix(p.as_array())


def mckay_delta(p):
    """Recurring denominator psi'(a1) + psi'(a2) - (a1 + a2) psi'(a1) psi'(a2)."""
    P1, P2, _, _ = _polygammas(p.alpha1, p.alpha2)
    return P1 + P2 - (p.alpha1 + p.alpha2) * P1 * P2


def mckay_metric_inverse(p):
    """
    Printed inverse metric

    Args:
        p: McKayParams

    Returns:
        np.ndarray: 3x3 symmetric matrix
    """
    a1, s, a2 = p.alpha1, p.sigma12, p.alpha2
    P1, P2, _, _ = _polygammas(a1, a2)
    A = a1 + a2
    D = P2 + P1 * (1 - A * P2)
    if abs(D) < PipelineDefaults.singular_threshold * max(abs(P1) + abs(P2), abs(A * P1 * P2)):
        raise DomainError(f"inverse metric denominator vanishes at {p}", invariant='D != 0')
    g11 = -(-1 + A * P2) / D
    g12 = s * (1 + (a1 - a2) * P2) / (a1 * D)
    g13 = 1 / (-P2 + P1 * (-1 + A * P2))
    g22 = s ** 2 * (-1 + (-3 * a1 + a2 + 4 * a1 ** 2 * P1) * P2) / (a1 ** 2 * -D)
    g23 = s * (-1 + 2 * a1 * P1) / (a1 * D)
    g33 = -(-1 + A * P1) / D
    return np.array([[g11, g12, g13], [g12, g22, g23], [g13, g23, g33]])


def mckay_riemann_components(p, corrected=False):
    """
    The six independent curvature components R_1212 ... R_2323

    The printed R_1323 disagrees with the curvature of the printed metric unless
    alpha1 = alpha2; corrected=True returns -psi'(a1)(psi'(a2) + (a2 - a1) psi''(a2))/(16 a1 s D).
    """
    a1, s, a2 = p.alpha1, p.sigma12, p.alpha2
    P1, P2, Q1, Q2 = _polygammas(a1, a2)
    A = a1 + a2
    D = P1 + P2 - A * P1 * P2
    r1323 = (-P1 * (P2 + (a2 - a1) * Q2) if corrected else -P2 * (P2 + (a2 - a1) * Q2)) / (16 * a1 * s * D)
    return {
        '1212': P2 * (P1 + A * Q1) / (16 * s ** 2 * D),
        '1213': P2 * (P1 + 2 * a1 * Q1) / (16 * a1 * s * D),
        '1223': -P1 * P2 / (16 * s ** 2 * D),
        '1313': -(-P1 * P2 + ((3 * a1 - a2) * P1 + 4 * a1 ** 2 * Q1) * Q2) / (16 * a1 ** 2 * D),
        '1323': r1323,
        '2323': P1 * (P2 + A * Q2) / (16 * s ** 2 * D),
    }


def mckay_ricci(p):
    a1, s, a2 = p.alpha1, p.sigma12, p.alpha2
    P1, P2, Q1, Q2 = _polygammas(a1, a2)
    A = a1 + a2
    D = P1 + P2 - A * P1 * P2
    D2 = D * D
    r11 = ((-3 * P1 ** 2 * P2 - 3 * P1 * P2 ** 2) / (16 * a1 * D2)
           + (a2 * P1 ** 2 * P2 + a2 * P1 * P2 ** 2) / (16 * a1 ** 2 * D2)
           + (P1 ** 2 * P2 ** 2 - 2 * P1 * P2 * Q1) / (4 * D2)
           + (-(a2 * P2 * Q1) + a2 ** 2 * P2 ** 2 * Q1) / (16 * a1 ** 2 * D2)
           + (a1 * P1 * P2 ** 2 * Q1 + a2 * P1 * P2 ** 2 * Q1) / (4 * D2)
           + (3 * P2 * Q1 + 3 * P1 * Q2) / (16 * a1 * D2)
           + (-3 * P2 ** 2 * Q1 - 3 * P1 ** 2 * Q2) / (16 * D2)
           + (-(a2 * P2 ** 2 * Q1) - a2 * P1 ** 2 * Q2) / (8 * a1 * D2)
           + (-(a2 * P1 * Q2) + a2 ** 2 * P1 ** 2 * Q2) / (16 * a1 ** 2 * D2)
           + (Q1 * Q2 - a1 * P1 * Q1 * Q2 - a2 * P1 * Q1 * Q2) / (4 * D2))
    r12 = ((P1 ** 2 * P2 + P1 * P2 ** 2 - P2 * Q1) / (16 * s * D2)
           + (-(a2 * P1 ** 2 * P2) - a2 * P1 * P2 ** 2 + a2 * P2 * Q1) / (16 * a1 * s * D2)
           + (a1 * P2 ** 2 * Q1 - P1 * Q2 + a1 * P1 ** 2 * Q2) / (16 * s * D2)
           + (-(a2 ** 2 * P2 ** 2 * Q1) + a2 * P1 * Q2 - a2 ** 2 * P1 ** 2 * Q2) / (16 * a1 * s * D2))
    r13 = ((-(P1 ** 2 * P2) - P1 * P2 ** 2 + P2 * Q1) / (8 * a1 * D2)
           + (P2 ** 2 * (Q1 + 2 * P1 ** 2) + Q2 * (P1 ** 2 + 2 * Q1)) / (8 * D2)
           + (-(a2 * P2 ** 2 * Q1) + P1 * Q2 - a2 * P1 ** 2 * Q2) / (8 * a1 * D2))
    core = P2 * (P1 * (P1 + P2) - Q1 + A * P2 * Q1) + P1 * (-1 + A * P1) * Q2
    r22 = A * core / (16 * s ** 2 * D2)
    r23 = core / (8 * s * D2)
    r33 = ((-2 * P1 * P2 + A * P2 * (P1 ** 2 - Q1) + Q1) * Q2 + P1 ** 2 * P2 ** 2) / (4 * D2)
    return np.array([[r11, r12, r13], [r12, r22, r23], [r13, r23, r33]])


def mckay_scalar(p):
    """Printed scalar curvature; contains no sigma12."""
    a1, a2 = p.alpha1, p.alpha2
    P1, P2, Q1, Q2 = _polygammas(a1, a2)
    A = a1 + a2
    D = P1 + P2 - A * P1 * P2
    D2 = D * D
    return ((P1 ** 2 * P2 + P1 * P2 ** 2 + a1 * P2 ** 2 * Q1) / (2 * D2)
            + (-(P2 * Q1) - P1 * Q2) / D2
            + (a2 * P2 ** 2 * Q1 + a1 * P1 ** 2 * Q2 + a2 * P1 ** 2 * Q2) / (2 * D2)
            + (-(a1 * Q1 * Q2) - a2 * Q1 * Q2) / (2 * D2))


def mckay_sectional(p):
    a1, a2 = p.alpha1, p.alpha2
    P1, P2, Q1, Q2 = _polygammas(a1, a2)
    A = a1 + a2
    D = P1 + P2 - A * P1 * P2
    B = a2 + a1 * (-3 + 4 * a1 * P1)
    return {
        (0, 1): -P2 * (P1 + A * Q1) / (4 * (-1 + A * P1) * D),
        (0, 2): -(P1 * P2 + ((-3 * a1 + a2) * P1 - 4 * a1 ** 2 * Q1) * Q2) / (4 * D * (-1 + B * P2)),
        (1, 2): -P1 * (P2 + A * Q2) / (4 * (-1 + A * P2) * D),
    }


def mckay_mean(p):
    a1, a2 = p.alpha1, p.alpha2
    P1, P2, Q1, Q2 = _polygammas(a1, a2)
    A = a1 + a2
    D = P1 + P2 - A * P1 * P2
    D2 = D * D
    B = a2 + a1 * (-3 + 4 * a1 * P1)
    E = 8 * B * D2
    m1 = ((-3 * a1 * P1 ** 2 * P2 + a2 * P1 ** 2 * P2 - 3 * a1 * P1 * P2 ** 2) / E
          + (a2 * P1 * P2 ** 2 + 4 * a1 ** 2 * P1 ** 2 * P2 ** 2 + 3 * a1 * P2 * Q1) / E
          + (-(a2 * P2 * Q1) - 8 * a1 ** 2 * P1 * P2 * Q1 - 3 * a1 ** 2 * P2 ** 2 * Q1) / E
          + (-2 * a1 * a2 * P2 ** 2 * Q1 + a2 ** 2 * P2 ** 2 * Q1 + 4 * a1 ** 3 * P1 * P2 ** 2 * Q1) / E
          + (4 * a1 ** 2 * a2 * P1 * P2 ** 2 * Q1 + 3 * a1 * P1 * Q2 - a2 * P1 * Q2) / E
          + (-3 * a1 ** 2 * P1 ** 2 * Q2 - 2 * a1 * a2 * P1 ** 2 * Q2 + a2 ** 2 * P1 ** 2 * Q2) / E
          + (a1 ** 2 * Q1 * Q2 - a1 ** 3 * P1 * Q1 * Q2 - a1 ** 2 * a2 * P1 * Q1 * Q2) / (2 * B * D2))
    m2 = (P2 * (P1 * (P1 + P2) - Q1 + A * P2 * Q1) + P1 * (-1 + A * P1) * Q2) / (8 * D2)
    m3 = ((-2 * P1 * P2 + A * P2 * (P1 ** 2 - Q1) + Q1) * Q2 + P1 ** 2 * P2 ** 2) / (8 * P2 * D2)
    return {0: m1, 1: m2, 2: m3}


def mckay_report(p, corrected=False):
    """All McKay closed forms at one point, with provenance and near-singular flags."""
    flags = []
    P1, P2, _, _ = _polygammas(p.alpha1, p.alpha2)
    A = p.alpha1 + p.alpha2
    _flag_denominator(flags, 'psi1 + psi2 - (a1 + a2) psi1 psi2', mckay_delta(p),
                      max(P1 + P2, A * P1 * P2), (p.alpha1, p.sigma12, p.alpha2))
    provenance = {key: 'McKay curvature tensor' for key in RIEMANN_KEYS}
    provenance['1323'] = ('McKay curvature tensor, R_1323 repaired (leading psi\'(a1))' if corrected
                          else 'McKay curvature tensor, R_1323 as printed')
    provenance.update({'metric': 'McKay Fisher metric', 'inverse_metric': 'McKay inverse metric',
                       'ricci': 'McKay Ricci tensor', 'scalar': 'McKay scalar curvature',
                       'sectional': 'McKay sectional curvatures', 'mean': 'McKay mean curvatures'})
    return ClosedFormReport('mckay', (p.alpha1, p.sigma12, p.alpha2), mckay_metric(p),
                            mckay_metric_inverse(p), mckay_riemann_components(p, corrected),
                            mckay_ricci(p), mckay_scalar(p), mckay_sectional(p), mckay_mean(p),
                            provenance=provenance, flags=flags)


def mckay_scalar_at(alpha1, alpha2):
    # sigma12 never enters the scalar
    return mckay_scalar(McKayParams(alpha1, 1.0, alpha2))


def mckay_scalar_ray_limit(k):
    """Limit of the McKay scalar as eps -> 0 along alpha2 = k * alpha1 = k * eps."""
    if k <= 0:
        raise DomainError(f"ray slope must be positive, got {k}", invariant='k > 0')
    return -(k ** 2 + 4 * k + 1) / (2 * (1 + k) ** 2)


def mckay_scalar_along_ray(k, eps_grid):
    """List of (eps, scalar at (eps, k * eps))."""
    return [(float(eps), mckay_scalar_at(eps, k * eps)) for eps in eps_grid]


def five_manifold_metric(p):
    """
    Printed 5x5 metric in (alpha1, alpha2, sigma12, gamma1, gamma2)

    Args:
        p: FiveGammaParams with alpha1, alpha2 > 2

    Returns:
        np.ndarray: Symmetric matrix, independent of gamma1 and gamma2
    """
    if p.alpha1 <= 2 or p.alpha2 <= 2:
        raise DomainError("five-parameter metric needs alpha1, alpha2 > 2", invariant='alpha1, alpha2 > 2')
    return five_metric_matrix(p.as_array())


def submanifold_params(tag, coords):
    tag = SubmanifoldId.parse(tag)
    _check_coords(coords)
    return McKayParams(*lift_to_mckay(tag.value, coords))


def submanifold_correlation(tag, coords):
    return mckay_correlation(submanifold_params(tag, coords))


def _check_coords(coords):
    c = np.asarray(coords, dtype=float)
    if c.shape != (2,) or not np.all(np.isfinite(c)) or np.any(c <= 0):
        raise DomainError(f"submanifold coordinates must be two positive reals, got {coords!r}",
                          invariant='coords in (0, inf)^2')
    return c


def _m1_like(shape, P, Q):
    """Shared M1/M2 factors: D = -1 + (1 + a) psi'(a), N = psi'(a) + (1 + a) psi''(a)."""
    return -1 + (1 + shape) * P, P + (1 + shape) * Q


def _m1(s, a2):
    P, Q = trigamma(a2), tetragamma(a2)
    D, N = _m1_like(a2, P, Q)
    metric = np.array([[(1 + a2) / (4 * s ** 2), 1 / (2 * s)], [1 / (2 * s), P]])
    inverse = np.array([[4 * s ** 2 * P / D, -2 * s / D], [-2 * s / D, (1 + a2) / D]])
    gamma = np.array([
        [[(-4 + 1 / D) / (4 * s), P / (2 * D)], [P / (2 * D), -s * Q / D]],
        [[-(1 + a2) / (8 * s ** 2 * D), -1 / (4 * s * D)], [-1 / (4 * s * D), (1 + a2) * Q / (2 * D)]],
    ])
    r1212 = -N / (16 * s ** 2 * D)
    r11 = (1 + a2) * N / (16 * s ** 2 * D ** 2)
    r12 = N / (8 * s * D ** 2)
    r22 = P * N / (4 * D ** 2)
    scalar = N / (2 * D ** 2)
    return metric, inverse, gamma, r1212, (r11, r12, r22), scalar, ('D', D, abs((1 + a2) * P))


def _m2(a1, s):
    P, Q = trigamma(a1), tetragamma(a1)
    D, N = _m1_like(a1, P, Q)
    B1 = 1 + a1 * (-3 + 4 * a1 * P)
    metric = np.array([[(1 - 3 * a1) / (4 * a1 ** 2) + P, (a1 - 1) / (4 * a1 * s)],
                       [(a1 - 1) / (4 * a1 * s), (1 + a1) / (4 * s ** 2)]])
    inverse = np.array([[(1 + a1) / D, -(a1 - 1) * s / (a1 * D)],
                        [-(a1 - 1) * s / (a1 * D), s ** 2 * B1 / (a1 ** 2 * D)]])
    g1_12 = -(a1 - 1) / (8 * a1 * s * D)
    g2_12 = B1 / (8 * a1 ** 2 * D)
    gamma = np.array([
        [[(-1 + a1 * (3 + 4 * a1 * (1 + a1) * Q)) / (8 * a1 ** 2 * D), g1_12],
         [g1_12, -(1 + a1) / (8 * s ** 2 * D)]],
        [[s * (-1 + a1 * (-3 + 8 * P - 4 * (a1 - 1) * a1 * Q)) / (8 * a1 ** 3 * D), g2_12],
         [g2_12, (-8 + (a1 - 1) / (a1 * D)) / (8 * s)]],
    ])
    r1212 = -N / (16 * s ** 2 * D)
    r11 = B1 * N / (16 * a1 ** 2 * D ** 2)
    r12 = (a1 - 1) * N / (16 * a1 * s * D ** 2)
    r22 = (1 + a1) * N / (16 * s ** 2 * D ** 2)
    scalar = N / (2 * D ** 2)
    return metric, inverse, gamma, r1212, (r11, r12, r22), scalar, ('D', D, abs((1 + a1) * P))


def _m3(a1, a2, corrected):
    P1, P2, Q1, Q2 = _polygammas(a1, a2)
    B = a2 + a1 * (-3 + 4 * a1 * P1)
    E = -1 + B * P2
    T = -a2 + a1 * (-3 + 12 * a1 * P1 + 8 * a1 ** 2 * Q1)
    metric = np.array([[(-3 * a1 + a2) / (4 * a1 ** 2) + P1, -1 / (2 * a1)], [-1 / (2 * a1), P2]])
    inverse = np.array([[4 * a1 ** 2 * P2 / E, 2 * a1 / E], [2 * a1 / E, B / E]])
    g1_12 = P2 / (-2 + 2 * B * P2)
    g2_12 = 1 / (4 * a1 * E)
    gamma = np.array([
        [[(3 + 2 * P2 * (3 * a1 - 2 * a2 + 4 * a1 ** 3 * Q1)) / (4 * a1 * E), g1_12],
         [g1_12, a1 * Q2 / E]],
        [[T / (8 * a1 ** 2 * E), g2_12],
         [g2_12, B * Q2 / (-2 + 2 * B * P2)]],
    ])
    r1212 = (-P2 + T * Q2) / (16 * a1 ** 2 * E)
    if corrected:
        r11 = B * (P2 - T * Q2) / (16 * a1 ** 2 * E ** 2)
    else:
        # second term carries psi'(a2)^2 as printed
        r11 = B * (T * Q2) / (-16 * a1 ** 2 * E ** 2) + P2 * B * P2 / (16 * a1 ** 2 * E ** 2)
    r12 = (-P2 + T * Q2) / (8 * a1 * E ** 2)
    W = a2 + a1 * (3 - 4 * a1 * (3 * P1 + 2 * a1 * Q1))
    r22 = P2 * (P2 + W * Q2) / (4 * E ** 2)
    scalar = (P2 + W * Q2) / (2 * E ** 2)
    return metric, inverse, gamma, r1212, (r11, r12, r22), scalar, ('E', E, abs(B * P2))


_SUBMANIFOLD_FORMULAS = {SubmanifoldId.M1: _m1, SubmanifoldId.M2: _m2, SubmanifoldId.M3: _m3}


def submanifold_geometry(tag, coords, corrected=False):
    """
    Printed metric, inverse, Christoffels, R_1212, Ricci and scalar of M1, M2 or M3

    Args:
        tag: SubmanifoldId or 'M1' / 'M2' / 'M3'
        coords: Chart coordinates (sigma12, alpha2), (alpha1, sigma12) or (alpha1, alpha2)
        corrected: Repair the M3 Ricci R_11 printing error

    Returns:
        ClosedFormReport: christoffels[k, i, j] = Gamma^k_ij; sectional and mean derived from
            the printed R_1212 and Ricci
    """
    tag = SubmanifoldId.parse(tag)
    x, y = _check_coords(coords)
    formulas = _SUBMANIFOLD_FORMULAS[tag]
    parts = formulas(x, y, corrected) if tag is SubmanifoldId.M3 else formulas(x, y)
    metric, inverse, gamma, r1212, (r11, r12, r22), scalar, den = parts
    flags = []
    _flag_denominator(flags, den[0], den[1], den[2], (x, y))
    ricci = np.array([[r11, r12], [r12, r22]])
    area = metric[0, 0] * metric[1, 1] - metric[0, 1] ** 2
    provenance = {'metric': f"{tag.value} metric", 'inverse_metric': f"{tag.value} inverse metric",
                  'christoffels': f"{tag.value} Christoffel symbols",
                  '1212': f"{tag.value} curvature tensor", 'ricci': f"{tag.value} Ricci tensor",
                  'scalar': f"{tag.value} scalar curvature",
                  'sectional': 'derived: -R_1212 / det g', 'mean': 'derived: R_ll / g_ll'}
    if tag is SubmanifoldId.M3:
        provenance['ricci'] += (", R_11 repaired (psi'(a2) in the second term)" if corrected
                                else ', R_11 as printed')
    return ClosedFormReport(tag.value, (x, y), metric, inverse, {'1212': r1212}, ricci, scalar,
                            {(0, 1): -r1212 / area}, {0: r11 / metric[0, 0], 1: r22 / metric[1, 1]},
                            gamma, provenance, flags)


def rho_maps(tag, rho):
    """Free shape parameter giving correlation rho: M1 alpha2 = (1 - rho^2)/rho^2, M2 alpha1 = rho^2/(1 - rho^2)."""
    tag = SubmanifoldId.parse(tag)
    if not 0 < rho < 1:
        raise DomainError(f"rho must lie in (0, 1), got {rho}", invariant='0 < rho < 1')
    if tag is SubmanifoldId.M1:
        return (1 - rho ** 2) / rho ** 2
    if tag is SubmanifoldId.M2:
        return rho ** 2 / (1 - rho ** 2)
    raise DomainError("M3 correlation depends on both alpha1 and alpha2; no single-parameter map",
                      invariant='tag in {M1, M2}')


def _scalar_of_shape(tag, rho):
    shape = rho_maps(tag, rho)
    coords = (1.0, shape) if tag is SubmanifoldId.M1 else (shape, 1.0)
    return submanifold_geometry(tag, coords).scalar


def scalar_vs_rho_curve(tag, rho_grid):
    """
    Scalar curvature of M1 or M2 as a function of the correlation coefficient

    Returns:
        list: (rho, R) pairs in grid order
    """
    tag = SubmanifoldId.parse(tag)
    return [(float(rho), _scalar_of_shape(tag, rho)) for rho in rho_grid]


def m3_scalar_surface(alpha1_grid, alpha2_grid):
    """M3 scalar on a tensor grid; rows follow alpha1, columns alpha2."""
    return np.array([[submanifold_geometry(SubmanifoldId.M3, (a1, a2)).scalar for a2 in alpha2_grid]
                     for a1 in alpha1_grid])


if __name__ == '__main__':
    p = McKayParams(1.0, 1.0, 1.0)
    print(f"[ClosedForms] McKay metric at {p}:\n{mckay_metric(p)}")
    print(f"[ClosedForms] scalar {mckay_scalar(p):.10f}")
    print(f"[ClosedForms] M1 scalar at alpha2=1: {submanifold_geometry('M1', (1.0, 1.0)).scalar:.6f}")

