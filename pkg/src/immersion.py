"""
Affine immersion of the gamma manifold
Graph map (mu, alpha) -> (mu, alpha, log Gamma(alpha) - alpha log mu) in R^3, the curve of
exponential distributions on it, tubular neighbourhoods of that curve and the gamma /
log-gamma isometry.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from tqdm import tqdm

from config import TUBE_RADIUS
from distributions import GammaParams, LogGammaParams
from errors import DomainError
from special_functions import digamma, log_gamma, trigamma

logger = logging.getLogger(__name__)

DEFAULT_MU_RANGE = (1e-3, 1e3)
_SCAN_POINTS = 401


@dataclass(frozen=True)
class ImmersionPoint:
    mu: float
    alpha: float
    z: float

    @property
    def as_r3(self):
        return np.array([self.mu, self.alpha, self.z])

    @property
    def beta(self):
        """Mean of the distribution, the (alpha, beta) chart image."""
        return self.alpha / self.mu


@dataclass(frozen=True)
class TransversalField:
    xi: tuple = (0.0, 0.0, 1.0)

    def is_transversal(self, mu, alpha):
        """True when xi is not in the tangent plane spanned by h_mu, h_alpha."""
        frame = np.vstack([immersion_tangents(mu, alpha), self.xi])
        return bool(abs(np.linalg.det(frame)) > 0)


@dataclass(frozen=True)
class TubeSpec:
    radius: float = TUBE_RADIUS
    mu_range: tuple = DEFAULT_MU_RANGE

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"tube radius must be positive, got {self.radius}", invariant='radius > 0')
        lo, hi = self.mu_range
        if not 0 < lo < hi:
            raise DomainError(f"mu_range must be a positive interval, got {self.mu_range}",
                              invariant='0 < mu_lo < mu_hi')


@dataclass(frozen=True)
class CurveDistance:
    distance: float
    mu_star: float
    boundary_minimum: bool


@dataclass(frozen=True)
class SurfaceRow:
    mu: float
    alpha: float
    beta: float
    z: float
    dist_to_exp_curve: float
    in_tube: bool


def immerse_gamma(mu, alpha):
    if not (mu > 0 and alpha > 0 and math.isfinite(mu) and math.isfinite(alpha)):
        raise DomainError(f"immersion needs mu, alpha > 0, got ({mu}, {alpha})", invariant='mu, alpha > 0')
    return ImmersionPoint(float(mu), float(alpha), log_gamma(alpha) - alpha * math.log(mu))


def immersion_tangents(mu, alpha):
    """Rows d h / d mu and d h / d alpha."""
    return np.array([[1.0, 0.0, -alpha / mu], [0.0, 1.0, digamma(alpha) - math.log(mu)]])


def exponential_curve(mu):
    """The alpha = 1 slice: (mu, 1, log(1/mu))."""
    return immerse_gamma(mu, 1.0)


def _curve_sq_distance(mu, p):
    return (mu - p[0]) ** 2 + (1.0 - p[1]) ** 2 + (-math.log(mu) - p[2]) ** 2


def distance_to_exponential_curve(p, mu_range=DEFAULT_MU_RANGE, xtol=1e-10):
    """
    Euclidean distance in R^3 from p to the exponential curve over mu_range

    A log-spaced scan brackets the global minimum, then a bounded Brent search refines it.

    Args:
        p: 3-vector
        mu_range: (lo, hi) with 0 < lo < hi
        xtol: Absolute tolerance in mu

    Returns:
        CurveDistance: boundary_minimum is set when the minimizer sits at an interval end
    """
    lo, hi = TubeSpec(1.0, tuple(mu_range)).mu_range
    p = np.asarray(p, dtype=float)
    grid = np.geomspace(lo, hi, _SCAN_POINTS)
    values = (grid - p[0]) ** 2 + (1.0 - p[1]) ** 2 + (-np.log(grid) - p[2]) ** 2
    k = int(np.argmin(values))
    left, right = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(_curve_sq_distance, bounds=(left, right), args=(p,),
                                   method='bounded', options={'xatol': xtol})
    mu_star, sq = (float(res.x), float(res.fun)) if res.fun <= values[k] else (float(grid[k]), float(values[k]))
    at_edge = abs(mu_star - lo) <= 10 * xtol or abs(mu_star - hi) <= 10 * xtol
    if at_edge:
        logger.warning(f"distance to exponential curve from {tuple(p)} attained at mu-range edge {mu_star:.6g}")
    return CurveDistance(math.sqrt(max(sq, 0.0)), mu_star, at_edge)


def _mu_alpha(params):
    if isinstance(params, GammaParams):
        return params.alpha / params.beta, params.alpha
    mu, alpha = params
    return float(mu), float(alpha)


def tube_contains(params, tube=None):
    """
    Whether the immersed point lies within tube.radius of the exponential curve

    Args:
        params: GammaParams or a (mu, alpha) pair
        tube: TubeSpec
    """
    tube = tube or TubeSpec()
    mu, alpha = _mu_alpha(params)
    found = distance_to_exponential_curve(immerse_gamma(mu, alpha).as_r3, tube.mu_range)
    return found.distance < tube.radius


def certify_alpha_interval(radius=TUBE_RADIUS, mu_window=(0.5, 2.0), samples=9, iterations=50):
    """
    Largest delta with the rectangle mu_window x [1 - delta, 1 + delta] inside the tube

    Membership is tested on a samples x samples grid of the rectangle; delta is found by
    bisection on (0, 1).

    Returns:
        dict: radius, mu_window, delta, alpha_interval (empty when delta is 0)
    """
    tube = TubeSpec(radius)
    mus = np.linspace(mu_window[0], mu_window[1], samples)

    def inside(delta):
        alphas = np.linspace(1.0 - delta, 1.0 + delta, samples)
        return all(tube_contains((mu, a), tube) for mu in mus for a in alphas)

    lo, hi = 0.0, 1.0
    if not inside(lo):
        return {'radius': radius, 'mu_window': list(mu_window), 'delta': 0.0, 'alpha_interval': []}
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if inside(mid) else (lo, mid)
        if hi - lo < 1e-6:
            break
    logger.info(f"radius {radius}: alpha interval [1 - {lo:.6g}, 1 + {lo:.6g}] certified on mu in {mu_window}")
    return {'radius': radius, 'mu_window': list(mu_window), 'delta': lo,
            'alpha_interval': [1.0 - lo, 1.0 + lo] if lo > 0 else []}


def immersion_surface_grid(mu_grid, alpha_grid, tube=None, progress=False):
    """
    Immersed surface over a (mu, alpha) grid, row-major in mu

    Returns:
        list: SurfaceRow per grid point, carrying the (alpha, beta) chart image, the distance to
            the exponential curve and tube membership
    """
    tube = tube or TubeSpec()
    rows = []
    cells = [(mu, a) for mu in mu_grid for a in alpha_grid]
    for mu, a in tqdm(cells, desc='immersion grid', disable=not progress):
        point = immerse_gamma(mu, a)
        found = distance_to_exponential_curve(point.as_r3, tube.mu_range)
        rows.append(SurfaceRow(point.mu, point.alpha, point.beta, point.z, found.distance,
                               found.distance < tube.radius))
    return rows


def loggamma_isometry(p):
    """Gamma point (alpha, beta) to the log-gamma point with the same labels under N = exp(-x)."""
    return LogGammaParams(p.alpha, p.beta)


def gamma_metric_2d(mu, alpha):
    """Fisher metric of the gamma family in (mu, alpha), mu = alpha / beta the rate."""
    if not (mu > 0 and alpha > 0):
        raise DomainError(f"gamma metric needs mu, alpha > 0, got ({mu}, {alpha})", invariant='mu, alpha > 0')
    return np.array([[alpha / mu ** 2, -1.0 / mu], [-1.0 / mu, trigamma(alpha)]])


if __name__ == '__main__':
    print(f"[Immersion] exponential curve at mu=2: {exponential_curve(2.0).as_r3}")
    print(f"[Immersion] certificate: {certify_alpha_interval(0.2)}")
