"""
Density families of the gamma manifolds
Gamma, log-gamma, three-parameter gamma, McKay bivariate gamma (covariance and rate forms)
and the five-parameter bivariate gamma, with their domains, moments and marginals.

Every density is evaluated in log space; pdf = exp(logpdf).
Boundary convention for a vanishing factor t^(a-1) at t = 0: the density is 0 when a > 1,
the finite limit when a = 1, and a DomainError when it diverges (a < 1).
"""
import math
from dataclasses import dataclass, field

import numpy as np

from errors import DomainError
from special_functions import log_gamma


def _require_positive(**values):
    for name, value in values.items():
        if not (np.isfinite(value) and value > 0):
            raise DomainError(f"{name} must be a finite positive real, got {value!r}",
                              invariant=f"{name} > 0")


def _log_power(base, exponent_minus_one, what):
    """(a-1)*log(base) with the boundary convention applied at base == 0."""
    if base > 0:
        return exponent_minus_one * math.log(base)
    if base < 0:
        raise DomainError(f"point outside the support ({what} < 0)", invariant='support')
    if exponent_minus_one > 0:
        return -math.inf
    if exponent_minus_one == 0:
        return 0.0
    raise DomainError(f"density diverges on the boundary {what} = 0", invariant='support')


@dataclass(frozen=True)
class GammaParams:
    """Gamma family in the (shape alpha, mean beta) parametrization."""
    alpha: float
    beta: float

    def __post_init__(self):
        _require_positive(alpha=self.alpha, beta=self.beta)


@dataclass(frozen=True)
class LogGammaParams:
    alpha: float
    beta: float

    def __post_init__(self):
        _require_positive(alpha=self.alpha, beta=self.beta)


@dataclass(frozen=True)
class ThreeGammaParams:
    """Gamma shifted by the location gamma_loc >= 0; beta is the mean of the unshifted part."""
    beta: float
    alpha: float
    gamma_loc: float = 0.0

    def __post_init__(self):
        _require_positive(beta=self.beta, alpha=self.alpha)
        if not (np.isfinite(self.gamma_loc) and self.gamma_loc >= 0):
            raise DomainError(f"gamma_loc must be >= 0, got {self.gamma_loc!r}",
                              invariant='gamma_loc >= 0')


@dataclass(frozen=True)
class McKayParams:
    """Coordinates (alpha1, sigma12, alpha2) of the McKay 3-manifold."""
    alpha1: float
    sigma12: float
    alpha2: float

    def __post_init__(self):
        _require_positive(alpha1=self.alpha1, sigma12=self.sigma12, alpha2=self.alpha2)

    @property
    def c(self):
        return c_from_sigma(self.alpha1, self.sigma12)

    def to_rate(self):
        return McKayRateParams(self.alpha1, self.c, self.alpha2)

    def as_array(self):
        return np.array([self.alpha1, self.sigma12, self.alpha2])


@dataclass(frozen=True)
class McKayRateParams:
    alpha1: float
    c: float
    alpha2: float

    def __post_init__(self):
        _require_positive(alpha1=self.alpha1, c=self.c, alpha2=self.alpha2)

    def to_sigma(self):
        return McKayParams(self.alpha1, self.alpha1 / self.c ** 2, self.alpha2)


@dataclass(frozen=True)
class FiveGammaParams:
    """
    Bivariate three-parameter gamma point (alpha1, alpha2, sigma12, gamma1, gamma2)

    The manifold domain requires alpha1, alpha2 > 2. Use FiveGammaParams.unchecked for
    density experiments that only need alpha > 0.
    """
    alpha1: float
    alpha2: float
    sigma12: float
    gamma1: float = 0.0
    gamma2: float = 0.0
    relaxed: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        _require_positive(alpha1=self.alpha1, alpha2=self.alpha2, sigma12=self.sigma12)
        if not self.relaxed and (self.alpha1 <= 2 or self.alpha2 <= 2):
            raise DomainError(f"five-parameter manifold needs alpha1, alpha2 > 2, got "
                              f"({self.alpha1}, {self.alpha2})", invariant='alpha1, alpha2 > 2')
        for name in ('gamma1', 'gamma2'):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise DomainError(f"{name} must be >= 0, got {value!r}", invariant=f"{name} >= 0")

    @classmethod
    def unchecked(cls, alpha1, alpha2, sigma12, gamma1=0.0, gamma2=0.0):
        return cls(alpha1, alpha2, sigma12, gamma1, gamma2, relaxed=True)

    @property
    def c(self):
        return c_from_sigma(self.alpha1, self.sigma12)

    def as_array(self):
        return np.array([self.alpha1, self.alpha2, self.sigma12, self.gamma1, self.gamma2])


@dataclass(frozen=True)
class WedgePoint:
    x: float
    y: float


@dataclass(frozen=True)
class MarginalPair:
    """Gamma marginals of a McKay distribution, in the (shape, mean) parametrization."""
    x_params: GammaParams
    y_params: GammaParams

    def pdf_x(self, x):
        return gamma_pdf(x, self.x_params)

    def pdf_y(self, y):
        return gamma_pdf(y, self.y_params)


@dataclass(frozen=True)
class ShiftedMarginalPair:
    x_params: ThreeGammaParams
    y_params: ThreeGammaParams

    def pdf_x(self, x):
        return three_gamma_pdf(x, self.x_params)

    def pdf_y(self, y):
        return three_gamma_pdf(y, self.y_params)


def c_from_sigma(alpha1, sigma12):
    """Rate c = sqrt(alpha1 / sigma12) of the McKay distribution."""
    _require_positive(alpha1=alpha1, sigma12=sigma12)
    return math.sqrt(alpha1 / sigma12)


def gamma_logpdf(x, p):
    """
    Log-density of the gamma family (alpha/beta)^alpha x^(alpha-1) e^(-alpha x/beta)/Gamma(alpha)

    Args:
        x: Positive support point
        p: GammaParams

    Returns:
        float: log f(x; alpha, beta)
    """
    if not (np.isfinite(x) and x > 0):
        raise DomainError(f"gamma support is x > 0, got {x!r}", invariant='x > 0')
    a, b = p.alpha, p.beta
    return a * math.log(a / b) + (a - 1.0) * math.log(x) - a * x / b - log_gamma(a)


def gamma_pdf(x, p):
    return math.exp(gamma_logpdf(x, p))


def loggamma_logpdf(n, p):
    """Log-gamma density in N = exp(-x); equals gamma_logpdf(-log N) + log(1/N)."""
    if not (np.isfinite(n) and 0 < n < 1):
        raise DomainError(f"log-gamma support is 0 < N < 1, got {n!r}", invariant='0 < N < 1')
    x = -math.log(n)
    return gamma_logpdf(x, GammaParams(p.alpha, p.beta)) + x


def loggamma_pdf(n, p):
    return math.exp(loggamma_logpdf(n, p))


def three_gamma_logpdf(x, p):
    if not (np.isfinite(x) and x > p.gamma_loc):
        raise DomainError(f"three-parameter gamma support is x > {p.gamma_loc}, got {x!r}",
                          invariant='x > gamma_loc')
    return gamma_logpdf(x - p.gamma_loc, GammaParams(p.alpha, p.beta))


def three_gamma_pdf(x, p):
    return math.exp(three_gamma_logpdf(x, p))


def three_gamma_moments(p):
    """
    Mean, standard deviation and coefficient of variation of the shifted gamma

    Returns:
        tuple: (beta + gamma, beta / sqrt(alpha), beta / (sqrt(alpha) (beta + gamma)))
    """
    mean = p.beta + p.gamma_loc
    sd = p.beta / math.sqrt(p.alpha)
    return mean, sd, sd / mean


def three_gamma_sample(p, n, rng):
    return p.gamma_loc + rng.gamma(p.alpha, p.beta / p.alpha, size=n)


def _mckay_rate_log(x, w, alpha1, c, alpha2):
    # x and w = y - x are independent gamma(alpha, rate c) variables
    return ((alpha1 + alpha2) * math.log(c) - log_gamma(alpha1) - log_gamma(alpha2)
            + _log_power(x, alpha1 - 1.0, 'x')
            + _log_power(w, alpha2 - 1.0, 'y - x')
            - c * (x + w))


def mckay_rate_logpdf(pt, p):
    """Rate form c^(a1+a2) x^(a1-1) (y-x)^(a2-1) e^(-c y) / (Gamma(a1) Gamma(a2))."""
    return _mckay_rate_log(pt.x, pt.y - pt.x, p.alpha1, p.c, p.alpha2)


def mckay_rate_pdf(pt, p):
    return math.exp(mckay_rate_logpdf(pt, p))


def mckay_logpdf(pt, p):
    """
    McKay log-density in the covariance coordinates (alpha1, sigma12, alpha2)

    Args:
        pt: WedgePoint with 0 < x < y (boundary handled by the module convention)
        p: McKayParams

    Returns:
        float: log f(x, y)
    """
    a1, s, a2 = p.alpha1, p.sigma12, p.alpha2
    x, w = pt.x, pt.y - pt.x
    return (0.5 * (a1 + a2) * math.log(a1 / s) - log_gamma(a1) - log_gamma(a2)
            + _log_power(x, a1 - 1.0, 'x')
            + _log_power(w, a2 - 1.0, 'y - x')
            - math.sqrt(a1 / s) * pt.y)


def mckay_pdf(pt, p):
    return math.exp(mckay_logpdf(pt, p))


def mckay_marginals(p):
    """X ~ gamma(alpha1, rate c) and Y ~ gamma(alpha1 + alpha2, rate c)."""
    rate = p.to_rate() if isinstance(p, McKayParams) else p
    c = rate.c
    shape_y = rate.alpha1 + rate.alpha2
    return MarginalPair(GammaParams(rate.alpha1, rate.alpha1 / c),
                        GammaParams(shape_y, shape_y / c))


def mckay_correlation(p):
    """rho(X, Y) = sqrt(alpha1 / (alpha1 + alpha2)); accepts either McKay parametrization."""
    return math.sqrt(p.alpha1 / (p.alpha1 + p.alpha2))


def mckay_covariance(p):
    """Cov(X, Y) = alpha1 / c^2."""
    return p.alpha1 / p.c ** 2


def x_marginal_is_exponential(p):
    return p.alpha1 == 1.0


def both_marginals_exponential_feasible(alpha1, alpha2):
    """
    Whether both McKay marginals can be exponential

    The X marginal needs alpha1 = 1 and the Y marginal alpha1 + alpha2 = 1, which no
    alpha2 > 0 satisfies.
    """
    _require_positive(alpha1=alpha1, alpha2=alpha2)
    return alpha1 == 1.0 and alpha1 + alpha2 == 1.0


def five_gamma_logpdf(pt, p, variant='standard'):
    """
    Log-density of the bivariate three-parameter gamma

    Args:
        pt: WedgePoint with (y - gamma2) > (x - gamma1) > 0
        p: FiveGammaParams
        variant: 'standard' uses the factor (y - gamma2 - x + gamma1); 'printed_plus' uses
            (y - gamma2 + x - gamma1), kept only to show that form is not a density

    Returns:
        float: log f(x, y)
    """
    u = pt.x - p.gamma1
    v = pt.y - p.gamma2
    if u < 0 or v < u:
        raise DomainError(f"point ({pt.x}, {pt.y}) outside the shifted wedge",
                          invariant='(y - gamma2) > (x - gamma1) > 0')
    if variant == 'standard':
        w = v - u
    elif variant == 'printed_plus':
        w = v + u
    else:
        raise DomainError(f"unknown five-gamma variant {variant!r}", invariant='variant')
    a1, a2, s = p.alpha1, p.alpha2, p.sigma12
    return (0.5 * (a1 + a2) * math.log(a1 / s) - log_gamma(a1) - log_gamma(a2)
            + _log_power(u, a1 - 1.0, 'x - gamma1')
            + _log_power(w, a2 - 1.0, 'y - gamma2 - x + gamma1')
            - math.sqrt(a1 / s) * v)


def five_gamma_pdf(pt, p, variant='standard'):
    return math.exp(five_gamma_logpdf(pt, p, variant))


def five_gamma_marginals(p):
    """Marginals are three-parameter gammas with (c, alpha1, gamma1) and (c, alpha1+alpha2, gamma2)."""
    c = p.c
    shape_y = p.alpha1 + p.alpha2
    return ShiftedMarginalPair(ThreeGammaParams(p.alpha1 / c, p.alpha1, p.gamma1),
                               ThreeGammaParams(shape_y / c, shape_y, p.gamma2))


if __name__ == '__main__':
    params = McKayParams(1.0, 1.0, 1.0)
    print(f"[Distributions] McKay {params}: c={params.c}, rho={mckay_correlation(params):.6f}")
    print(f"[Distributions] f(1, 2) = {mckay_pdf(WedgePoint(1.0, 2.0), params):.7f}")
