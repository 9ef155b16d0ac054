"""
Riemannian curvature pipeline
From any MetricField computes Christoffel symbols, the Riemann tensor, Ricci tensor,
scalar, sectional and mean curvatures.

Index conventions (arrays are 0-based):
    dg[m, i, j]       = d_m g_ij
    gamma[k, i, j]    = Gamma^k_ij
    dgamma[m, k, i, j] = d_m Gamma^k_ij
    R^l_kij = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
    riemann_lowered[i, j, k, l] = -g_iq R^q_jkl

The overall sign of riemann_lowered makes R_1212 of the alpha1 = 1 McKay submanifold
positive. Ricci is R_ij = g^kl g_lq R^q_ikj, the scalar g^ij R_ij, the sectional curvature
-R_ijij / (g_ii g_jj - g_ij^2) and the mean curvature R_ll / ((n - 1) g_ll).
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from config import PipelineDefaults
from errors import DomainError, SingularMetricError, StepUnderflowError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MetricField:
    """
    A Riemannian metric on an open chart

    Attributes:
        dim: Chart dimension
        name: Label used in logs and reports
        coord_names: Coordinate labels
        domain: Predicate for points of the manifold
        metric_at: point -> (dim, dim) metric matrix
        metric_derivs_at: point -> (dim, dim, dim) array of d_m g_ij, or None
        stencil_domain: Predicate for points where metric_at may be evaluated by
            finite-difference stencils; defaults to domain
    """
    dim: int
    name: str
    coord_names: tuple
    domain: Callable
    metric_at: Callable
    metric_derivs_at: Optional[Callable] = None
    stencil_domain: Optional[Callable] = None

    def contains(self, point):
        return bool(self.domain(np.asarray(point, dtype=float)))

    def check(self, point):
        p = np.asarray(point, dtype=float)
        if p.shape != (self.dim,):
            raise DomainError(f"{self.name} expects {self.dim} coordinates, got {p.shape}",
                              invariant='point dimension')
        if not self.domain(p):
            raise DomainError(f"point {tuple(p)} outside the {self.name} domain",
                              invariant=f"{self.name} domain")
        return p

    def stencil_ok(self, point):
        predicate = self.stencil_domain or self.domain
        return bool(predicate(point))


@dataclass(frozen=True)
class GeometryReport:
    point: tuple
    metric: np.ndarray
    inverse_metric: np.ndarray
    christoffels: np.ndarray
    riemann_lowered: np.ndarray
    ricci: np.ndarray
    scalar: float
    sectional: dict = field(default_factory=dict)
    mean: dict = field(default_factory=dict)

    def to_dict(self):
        """JSON-ready view; sectional keys are 1-based 'ij', mean keys 1-based axis labels."""
        return {
            'point': list(self.point),
            'metric': self.metric.tolist(),
            'inverse_metric': self.inverse_metric.tolist(),
            'christoffels': self.christoffels.tolist(),
            'riemann_lowered': self.riemann_lowered.tolist(),
            'ricci': self.ricci.tolist(),
            'scalar': self.scalar,
            'sectional': {f"{i + 1}{j + 1}": v for (i, j), v in self.sectional.items()},
            'mean': {str(k + 1): v for k, v in self.mean.items()},
        }


def invert_metric(g, singular_threshold=PipelineDefaults.singular_threshold):
    """
    Inverse of a symmetric positive definite metric matrix

    Args:
        g: Symmetric matrix
        singular_threshold: Reject when 1/cond(g) falls below this value

    Returns:
        np.ndarray: Symmetric inverse
    """
    g = np.asarray(g, dtype=float)
    if not np.all(np.isfinite(g)):
        raise SingularMetricError("metric has non-finite entries")
    scale = max(np.max(np.abs(g)), 1e-300)
    if np.max(np.abs(g - g.T)) > 1e-12 * scale:
        raise DomainError("metric matrix is not symmetric", invariant='g symmetric')
    eig = np.linalg.eigvalsh(g)
    cond = float(eig[-1] / eig[0]) if eig[0] > 0 else float('inf')
    if eig[0] <= 0 or 1.0 / cond < singular_threshold:
        raise SingularMetricError("metric is singular or not positive definite", condition_number=cond)
    inv = np.linalg.solve(g, np.eye(g.shape[0]))
    return 0.5 * (inv + inv.T)


def _step_for(x, rel_step):
    return rel_step * abs(x) if x != 0 else rel_step


def richardson_derivative(func, point, axis, rel_step=PipelineDefaults.relative_step,
                          levels=PipelineDefaults.richardson_levels, valid=None):
    """
    Central-difference derivative of an array-valued func along one coordinate

    The step h = rel_step * |x| is halved `levels` times and the central differences are
    combined by Richardson extrapolation.

    Args:
        func: point -> np.ndarray
        point: Evaluation point
        axis: Coordinate index
        rel_step: Initial step relative to |point[axis]|
        levels: Number of halvings
        valid: Optional predicate every stencil point must satisfy

    Returns:
        np.ndarray: Derivative with the shape of func's output
    """
    p = np.asarray(point, dtype=float)
    h = _step_for(p[axis], rel_step)
    table = []
    for level in range(levels + 1):
        hh = h / 2 ** level
        plus, minus = p.copy(), p.copy()
        plus[axis] += hh
        minus[axis] -= hh
        if valid is not None and not (valid(plus) and valid(minus)):
            raise StepUnderflowError(f"stencil +/-{hh:.3e} on axis {axis} leaves the chart at {tuple(p)}",
                                     invariant='stencil inside chart')
        table.append((np.asarray(func(plus)) - np.asarray(func(minus))) / (2.0 * hh))
    for order in range(1, levels + 1):
        factor = 4.0 ** order
        table = [(factor * table[i + 1] - table[i]) / (factor - 1.0) for i in range(len(table) - 1)]
    return table[0]


def finite_difference_metric_derivs(mfield, point, rel_step=PipelineDefaults.relative_step,
                                    levels=PipelineDefaults.richardson_levels):
    """d_m g_ij by Richardson central differences; fallback and cross-check for analytic derivatives."""
    p = np.asarray(point, dtype=float)
    return np.array([richardson_derivative(mfield.metric_at, p, m, rel_step, levels, mfield.stencil_ok)
                     for m in range(mfield.dim)])


def metric_derivs(mfield, point):
    if mfield.metric_derivs_at is not None:
        return np.asarray(mfield.metric_derivs_at(point), dtype=float)
    return finite_difference_metric_derivs(mfield, point)


def christoffels_from(ginv, dg):
    """Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)."""
    term = dg + dg.transpose(1, 0, 2) - dg.transpose(1, 2, 0)
    gamma = 0.5 * np.einsum('kl,ijl->kij', ginv, term)
    return 0.5 * (gamma + gamma.transpose(0, 2, 1))


def christoffels(mfield, point):
    p = mfield.check(point)
    g = np.asarray(mfield.metric_at(p), dtype=float)
    return christoffels_from(invert_metric(g), metric_derivs(mfield, p))


def christoffel_derivs(mfield, point, rel_step=PipelineDefaults.relative_step,
                       levels=PipelineDefaults.richardson_levels):
    """d_m Gamma^k_ij by Richardson central differences of the Christoffel symbols."""
    p = mfield.check(point)

    def gamma_at(q):
        g = np.asarray(mfield.metric_at(q), dtype=float)
        return christoffels_from(invert_metric(g), metric_derivs(mfield, q))

    return np.array([richardson_derivative(gamma_at, p, m, rel_step, levels, mfield.stencil_ok)
                     for m in range(mfield.dim)])


def _riemann_up(gamma, dgamma):
    """R^l_kij as an array indexed [l, k, i, j]."""
    return (np.einsum('iljk->lkij', dgamma) - np.einsum('jlik->lkij', dgamma)
            + np.einsum('lim,mjk->lkij', gamma, gamma) - np.einsum('ljm,mik->lkij', gamma, gamma))


def _tensors(mfield, point):
    p = mfield.check(point)
    g = np.asarray(mfield.metric_at(p), dtype=float)
    ginv = invert_metric(g)
    gamma = christoffels_from(ginv, metric_derivs(mfield, p))
    dgamma = christoffel_derivs(mfield, p)
    lowered = np.einsum('lq,qkij->lkij', g, _riemann_up(gamma, dgamma))
    riemann = -lowered
    ric = np.einsum('kl,likj->ij', ginv, lowered)
    ric = 0.5 * (ric + ric.T)
    return p, g, ginv, gamma, riemann, ric


def riemann_lowered(mfield, point):
    return _tensors(mfield, point)[4]


def ricci(mfield, point):
    return _tensors(mfield, point)[5]


def scalar_curvature(mfield, point):
    _, _, ginv, _, _, ric = _tensors(mfield, point)
    return float(np.einsum('ij,ij->', ginv, ric))


def _sectional(g, riemann, i, j):
    if i == j:
        raise DomainError("sectional curvature needs two distinct axes", invariant='i != j')
    i, j = min(i, j), max(i, j)
    area = g[i, i] * g[j, j] - g[i, j] ** 2
    if area <= 0:
        raise DomainError(f"degenerate coordinate plane ({i}, {j})", invariant='g_ii g_jj - g_ij^2 > 0')
    return float(-riemann[i, j, i, j] / area)


def _mean(g, ric, lam):
    return float(ric[lam, lam] / ((g.shape[0] - 1) * g[lam, lam]))


def sectional_curvature(mfield, point, i, j):
    _, g, _, _, riemann, _ = _tensors(mfield, point)
    return _sectional(g, riemann, i, j)


def mean_curvature(mfield, point, lam):
    if not 0 <= lam < mfield.dim:
        raise DomainError(f"axis {lam} outside 0..{mfield.dim - 1}", invariant='valid axis')
    _, g, _, _, _, ric = _tensors(mfield, point)
    return _mean(g, ric, lam)


def full_report(mfield, point):
    """
    All pipeline objects at one point

    Args:
        mfield: MetricField
        point: Chart point

    Returns:
        GeometryReport
    """
    p, g, ginv, gamma, riemann, ric = _tensors(mfield, point)
    n = mfield.dim
    sectional = {(i, j): _sectional(g, riemann, i, j) for i in range(n) for j in range(i + 1, n)}
    mean = {lam: _mean(g, ric, lam) for lam in range(n)}
    scalar = float(np.einsum('ij,ij->', ginv, ric))
    logger.debug(f"{mfield.name} at {tuple(p)}: scalar {scalar:.10g}")
    return GeometryReport(tuple(float(x) for x in p), g, ginv, gamma, riemann, ric, scalar,
                          sectional, mean)
