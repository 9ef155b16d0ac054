"""
Quadrature Fisher information oracle
Computes g_ij = E[-d^2 log f / d theta^i d theta^j] by adaptive quadrature, independently of
any printed metric, so that closed forms can be checked against it.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats
from tqdm import tqdm

from config import THREADS, QuadratureDefaults
from distributions import (FiveGammaParams, GammaParams, LogGammaParams, McKayParams,
                           five_gamma_logpdf, gamma_logpdf, loggamma_logpdf,
                           mckay_logpdf)
from errors import DomainError, NonConvergenceError, StepUnderflowError
from special_functions import digamma, log_gamma, trigamma

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = QuadratureDefaults.abs_tol
    rel_tol: float = QuadratureDefaults.rel_tol
    max_subdivisions: int = QuadratureDefaults.max_subdivisions
    tail_cutoff_mass: float = QuadratureDefaults.tail_cutoff_mass

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise DomainError("quadrature tolerances must be positive", invariant='tolerances > 0')
        if not 0 < self.tail_cutoff_mass <= 1e-10:
            raise DomainError(f"tail_cutoff_mass must lie in (0, 1e-10], got {self.tail_cutoff_mass}",
                              invariant='tail_cutoff_mass <= 1e-10')
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be positive", invariant='max_subdivisions >= 1')

    def tightened(self, factor=10.0):
        return QuadratureConfig(self.abs_tol, self.rel_tol, self.max_subdivisions,
                                self.tail_cutoff_mass / factor)


@dataclass(frozen=True)
class FisherMatrix:
    dim: int
    entries: np.ndarray
    params: tuple
    estimated_error: float

    def is_symmetric(self, tol=None):
        tol = self.estimated_error if tol is None else tol
        return bool(np.max(np.abs(self.entries - self.entries.T)) <= tol)

    def is_positive_definite(self):
        return bool(np.all(np.linalg.eigvalsh(self.entries) > 0))


def _run_quad(integrand, lo, hi, cfg, what):
    value, err, info = integrate.quad_vec(integrand, lo, hi, epsabs=cfg.abs_tol,
                                          epsrel=cfg.rel_tol, limit=cfg.max_subdivisions,
                                          norm='max', full_output=True)
    if info.status == 1:
        raise NonConvergenceError(f"{what}: subdivision budget {cfg.max_subdivisions} exhausted "
                                  f"(error estimate {err:.3e})", residual=err)
    return np.asarray(value), float(err)


def gamma_expectation(func, shape, rate, cfg, pole_order=0):
    """
    E[func(X)] for X ~ gamma(shape, rate), truncated at the upper tail_cutoff_mass quantile

    The integral runs in t with rate*x = t^m, m the smallest integer making the integrand
    bounded at the origin when func grows like x^(-pole_order) there.

    Args:
        func: Callable returning a scalar or array for a positive x
        shape: Gamma shape (must exceed pole_order)
        rate: Gamma rate
        cfg: QuadratureConfig
        pole_order: Order of the pole of func at x = 0

    Returns:
        tuple: (expectation, error estimate)
    """
    if shape <= pole_order:
        raise DomainError(f"E[x^-{pole_order}] diverges for shape {shape}",
                          invariant=f"shape > {pole_order}")
    power = max(1, math.ceil(1.0 / (shape - pole_order)))
    upper = float(stats.gamma.isf(cfg.tail_cutoff_mass, shape)) ** (1.0 / power)
    log_norm = math.log(power) - log_gamma(shape)

    def integrand(t):
        s = t ** power
        weight = math.exp(log_norm + (power * shape - 1.0) * math.log(t) - s)
        return np.asarray(func(s / rate)) * weight

    return _run_quad(integrand, 0.0, upper, cfg, f"gamma({shape:g}) expectation")


class DensityFamily:
    """Base class: a parametric density with analytic derivatives in its parameters."""
    name = 'family'
    param_names = ()
    support_dim = 1
    pole_order = 0

    def validate(self, theta):
        return np.asarray(theta, dtype=float)

    def logpdf(self, point, theta):
        raise NotImplementedError

    def score(self, point, theta):
        raise NotImplementedError

    def param_hessian(self, point, theta):
        raise NotImplementedError


class GammaFamily(DensityFamily):
    """Gamma in (alpha, beta) with beta the mean."""
    name = 'gamma'
    param_names = ('alpha', 'beta')

    def validate(self, theta):
        GammaParams(*theta)
        return np.asarray(theta, dtype=float)

    def logpdf(self, x, theta):
        return gamma_logpdf(x, GammaParams(*theta))

    def score(self, x, theta):
        a, b = theta
        return np.array([math.log(a / b) + 1.0 + math.log(x) - x / b - digamma(a),
                         -a / b + a * x / b ** 2])

    def param_hessian(self, x, theta):
        a, b = theta
        cross = -1.0 / b + x / b ** 2
        return np.array([[1.0 / a - trigamma(a), cross],
                         [cross, a * (b - 2.0 * x) / b ** 3]])

    def expectation(self, func, theta, cfg):
        a, b = theta
        return gamma_expectation(func, a, a / b, cfg)


class GammaNaturalFamily(GammaFamily):
    """Gamma in (mu, alpha) with mu = alpha / beta the rate."""
    name = 'gamma_natural'
    param_names = ('mu', 'alpha')

    def validate(self, theta):
        mu, a = theta
        GammaParams(a, a / mu)
        return np.asarray(theta, dtype=float)

    def logpdf(self, x, theta):
        mu, a = theta
        return gamma_logpdf(x, GammaParams(a, a / mu))

    def score(self, x, theta):
        mu, a = theta
        return np.array([a / mu - x, math.log(mu) + math.log(x) - digamma(a)])

    def param_hessian(self, x, theta):
        mu, a = theta
        return np.array([[-a / mu ** 2, 1.0 / mu],
                         [1.0 / mu, -trigamma(a)]])

    def expectation(self, func, theta, cfg):
        mu, a = theta
        return gamma_expectation(func, a, mu, cfg)


class LogGammaFamily(GammaFamily):
    """Log-gamma in N = exp(-x); expectations are integrated over N in (0, 1)."""
    name = 'loggamma'

    def validate(self, theta):
        LogGammaParams(*theta)
        return np.asarray(theta, dtype=float)

    def logpdf(self, n, theta):
        return loggamma_logpdf(n, LogGammaParams(*theta))

    def score(self, n, theta):
        return super().score(-math.log(n), theta)

    def param_hessian(self, n, theta):
        # the Jacobian term log(1/N) carries no parameter dependence
        return super().param_hessian(-math.log(n), theta)

    def expectation(self, func, theta, cfg):
        a, b = theta
        x_hi = float(stats.gamma.isf(cfg.tail_cutoff_mass, a, scale=b / a))
        params = LogGammaParams(a, b)

        def integrand(n):
            return np.asarray(func(n)) * math.exp(loggamma_logpdf(n, params))

        return _run_quad(integrand, math.exp(-x_hi), 1.0, cfg, 'log-gamma expectation')


class McKayFamily(DensityFamily):
    """
    McKay density in (alpha1, sigma12, alpha2)

    In wedge coordinates u = x, w = y - x the density is a product of independent
    gamma(alpha1, c) and gamma(alpha2, c) factors, and the parameter Hessian splits into a
    constant part plus a function of u plus a function of w.
    """
    name = 'mckay'
    param_names = ('alpha1', 'sigma12', 'alpha2')
    support_dim = 2

    def validate(self, theta):
        McKayParams(*theta)
        return np.asarray(theta, dtype=float)

    def latent(self, theta):
        a1, s, a2 = theta
        return a1, a2, math.sqrt(a1 / s)

    def wedge_coordinates(self, pt, theta):
        return pt.x, pt.y - pt.x

    def logpdf(self, pt, theta):
        return mckay_logpdf(pt, McKayParams(*theta))

    def score(self, pt, theta):
        a1, s, a2 = theta
        u, w = self.wedge_coordinates(pt, theta)
        return self._score_uw(u, w, theta)

    def _score_uw(self, u, w, theta):
        a1, s, a2 = theta
        c = math.sqrt(a1 / s)
        log_c = math.log(c)
        total = u + w
        return np.array([log_c + (a1 + a2) / (2 * a1) - digamma(a1) + math.log(u) - c * total / (2 * a1),
                         -(a1 + a2) / (2 * s) + c * total / (2 * s),
                         log_c - digamma(a2) + math.log(w)])

    def hessian_parts(self, theta):
        a1, s, a2 = theta
        c = math.sqrt(a1 / s)
        const = np.array([
            [1 / a1 - (a1 + a2) / (2 * a1 ** 2) - trigamma(a1), -1 / (2 * s), 1 / (2 * a1)],
            [-1 / (2 * s), (a1 + a2) / (2 * s ** 2), -1 / (2 * s)],
            [1 / (2 * a1), -1 / (2 * s), -trigamma(a2)],
        ])
        linear = np.array([
            [c / (4 * a1 ** 2), c / (4 * a1 * s), 0.0],
            [c / (4 * a1 * s), -3 * c / (4 * s ** 2), 0.0],
            [0.0, 0.0, 0.0],
        ])
        return const, (lambda u: u * linear), (lambda w: w * linear)

    def param_hessian(self, pt, theta):
        u, w = self.wedge_coordinates(pt, theta)
        const, part_u, part_w = self.hessian_parts(theta)
        return const + part_u(u) + part_w(w)


class FiveGammaFamily(McKayFamily):
    """Bivariate three-parameter gamma in (alpha1, alpha2, sigma12, gamma1, gamma2)."""
    name = 'mckay5'
    param_names = ('alpha1', 'alpha2', 'sigma12', 'gamma1', 'gamma2')
    pole_order = 2

    def validate(self, theta):
        FiveGammaParams(*theta)
        return np.asarray(theta, dtype=float)

    def latent(self, theta):
        a1, a2, s = theta[:3]
        return a1, a2, math.sqrt(a1 / s)

    def wedge_coordinates(self, pt, theta):
        u = pt.x - theta[3]
        return u, pt.y - theta[4] - u

    def logpdf(self, pt, theta):
        return five_gamma_logpdf(pt, FiveGammaParams(*theta))

    def _score_uw(self, u, w, theta):
        a1, a2, s = theta[:3]
        c = math.sqrt(a1 / s)
        mckay = super()._score_uw(u, w, (a1, s, a2))
        return np.array([mckay[0], mckay[2], mckay[1],
                         -(a1 - 1) / u + (a2 - 1) / w,
                         -(a2 - 1) / w + c])

    def hessian_parts(self, theta):
        a1, a2, s = theta[:3]
        c = math.sqrt(a1 / s)
        order = [0, 2, 1]
        const3, part_u3, part_w3 = super().hessian_parts((a1, s, a2))
        const = np.zeros((5, 5))
        const[:3, :3] = const3[np.ix_(order, order)]
        const[0, 4] = const[4, 0] = c / (2 * a1)
        const[2, 4] = const[4, 2] = -c / (2 * s)

        def part_u(u):
            h = np.zeros((5, 5))
            h[:3, :3] = part_u3(u)[np.ix_(order, order)]
            h[0, 3] = h[3, 0] = -1 / u
            h[3, 3] = -(a1 - 1) / u ** 2
            return h

        def part_w(w):
            h = np.zeros((5, 5))
            h[:3, :3] = part_w3(w)[np.ix_(order, order)]
            h[1, 3] = h[3, 1] = 1 / w
            h[1, 4] = h[4, 1] = -1 / w
            h[3, 3] = -(a2 - 1) / w ** 2
            h[3, 4] = h[4, 3] = (a2 - 1) / w ** 2
            h[4, 4] = -(a2 - 1) / w ** 2
            return h

        return const, part_u, part_w


FAMILIES = {f.name: f for f in (GammaFamily(), GammaNaturalFamily(), LogGammaFamily(),
                                McKayFamily(), FiveGammaFamily())}


def log_density_param_hessian(family, params, sample, step):
    """
    Central-difference Hessian of theta -> log f(sample; theta)

    Args:
        family: DensityFamily
        params: Interior parameter point
        sample: Support point
        step: Finite-difference step (> 0)

    Returns:
        np.ndarray: Symmetric Hessian
    """
    if step <= 0:
        raise DomainError("step must be positive", invariant='step > 0')
    theta = np.asarray(params, dtype=float)
    dim = theta.size

    def f(offsets):
        point = theta + offsets
        try:
            family.validate(point)
        except DomainError as exc:
            raise StepUnderflowError(f"stencil point {point} leaves the {family.name} domain: {exc}",
                                     invariant=exc.invariant) from exc
        return family.logpdf(sample, point)

    eye = np.eye(dim) * step
    center = f(np.zeros(dim))
    hess = np.zeros((dim, dim))
    for i in range(dim):
        hess[i, i] = (f(eye[i]) - 2.0 * center + f(-eye[i])) / step ** 2
        for j in range(i + 1, dim):
            value = (f(eye[i] + eye[j]) - f(eye[i] - eye[j])
                     - f(-eye[i] + eye[j]) + f(-eye[i] - eye[j])) / (4.0 * step ** 2)
            hess[i, j] = hess[j, i] = value
    return hess


def fisher_univariate(family, params, cfg=None):
    """
    Fisher matrix of a one-variable family by quadrature of the expected negative Hessian

    Args:
        family: GammaFamily, GammaNaturalFamily or LogGammaFamily
        params: Parameter point
        cfg: QuadratureConfig

    Returns:
        FisherMatrix
    """
    cfg = cfg or QuadratureConfig()
    theta = family.validate(params)
    value, err = family.expectation(lambda x: -family.param_hessian(x, theta), theta, cfg)
    entries = 0.5 * (value + value.T)
    logger.debug(f"{family.name} at {tuple(theta)}: error estimate {err:.2e}")
    return FisherMatrix(len(theta), entries, tuple(theta), err)


def _bivariate_expectation_2d(func, family, theta, cfg):
    a1, a2, c = family.latent(theta)
    errors = []

    def inner(u):
        value, err = gamma_expectation(lambda w: func(u, w), a2, c, cfg, family.pole_order)
        errors.append(err)
        return value

    value, err = gamma_expectation(inner, a1, c, cfg, family.pole_order)
    return value, err + (max(errors) if errors else 0.0)


def fisher_bivariate_wedge(family, params, cfg=None, separable=True):
    """
    Fisher matrix of a wedge-supported bivariate family

    The wedge is mapped to the quadrant by u = x - gamma1, w = y - x - (gamma2 - gamma1), where
    the density factorizes into independent gamma factors. With separable=True each Hessian
    part is a one-dimensional integral; separable=False runs the tensor-product 2-D quadrature.

    Args:
        family: McKayFamily or FiveGammaFamily
        params: Parameter point
        cfg: QuadratureConfig
        separable: Use the factorized integrals

    Returns:
        FisherMatrix
    """
    cfg = cfg or QuadratureConfig()
    theta = family.validate(params)
    if isinstance(family, FiveGammaFamily) and (theta[0] <= 2 or theta[1] <= 2):
        raise DomainError("location rows need alpha1, alpha2 > 2", invariant='alpha1, alpha2 > 2')
    const, part_u, part_w = family.hessian_parts(theta)
    if separable:
        a1, a2, c = family.latent(theta)
        exp_u, err_u = gamma_expectation(part_u, a1, c, cfg, family.pole_order)
        exp_w, err_w = gamma_expectation(part_w, a2, c, cfg, family.pole_order)
        value, err = const + exp_u + exp_w, err_u + err_w
    else:
        value, err = _bivariate_expectation_2d(lambda u, w: const + part_u(u) + part_w(w),
                                               family, theta, cfg)
    entries = -0.5 * (value + value.T)
    logger.debug(f"{family.name} at {tuple(theta)}: error estimate {err:.2e}")
    return FisherMatrix(len(theta), entries, tuple(theta), err)


def fisher_score_covariance(family, params, cfg=None):
    """Secondary cross-check form E[score score^T]."""
    cfg = cfg or QuadratureConfig()
    theta = family.validate(params)
    if family.support_dim == 1:
        value, err = family.expectation(lambda x: np.outer(family.score(x, theta),
                                                           family.score(x, theta)), theta, cfg)
    else:
        def outer(u, w):
            g = family._score_uw(u, w, theta)
            return np.outer(g, g)

        value, err = _bivariate_expectation_2d(outer, family, theta, cfg)
    entries = 0.5 * (value + value.T)
    return FisherMatrix(len(theta), entries, tuple(theta), err)


def fisher(family, params, cfg=None):
    if family.support_dim == 1:
        return fisher_univariate(family, params, cfg)
    return fisher_bivariate_wedge(family, params, cfg)


def fisher_grid(family, param_list, cfg=None, threads=None, progress=False):
    """
    Oracle Fisher matrices over a list of parameter points

    Args:
        family: DensityFamily
        param_list: Iterable of parameter points
        cfg: QuadratureConfig
        threads: Worker count (defaults to GAMMAGEOM_THREADS)
        progress: Show a tqdm progress bar

    Returns:
        list: FisherMatrix per point, in input order
    """
    points = list(param_list)
    workers = max(1, threads or THREADS)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = pool.map(lambda p: fisher(family, p, cfg), points)
        return list(tqdm(results, total=len(points), desc=f"oracle {family.name}",
                         disable=not progress))


def compare_fisher(closed, oracle, tol):
    """
    Deviation between a closed-form matrix and an oracle FisherMatrix

    Returns:
        dict: max_abs, max_rel, within_tol
    """
    closed = np.asarray(closed, dtype=float)
    diff = np.abs(closed - oracle.entries)
    scale = np.maximum(np.abs(oracle.entries), 1e-300)
    max_abs = float(np.max(diff))
    return {'max_abs': max_abs, 'max_rel': float(np.max(diff / scale)),
            'within_tol': bool(max_abs <= tol)}


if __name__ == '__main__':
    result = fisher(FAMILIES['mckay'], (1.0, 1.0, 1.0))
    print(f"[FisherOracle] McKay (1,1,1):\n{result.entries}")
    print(f"[FisherOracle] error estimate {result.estimated_error:.2e}")

