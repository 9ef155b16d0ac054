"""
McKay sampling and estimation
Exact sampling through the wedge factorization X ~ gamma(alpha1, c), Y - X ~ gamma(alpha2, c),
moment and Fisher-scoring maximum likelihood fits, and a Kolmogorov-Smirnov check of the
X-marginal.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, stats

from closed_forms import mckay_metric
from config import MIN_FIT_SAMPLES, MLE_MAX_ITER, MLE_SCORE_TOL, THREADS
from distributions import McKayParams, McKayRateParams, gamma_pdf, mckay_marginals
from errors import DomainError, NonConvergenceError
from output import read_csv, write_csv
from special_functions import digamma, log_gamma

logger = logging.getLogger(__name__)


@dataclass
class BivariateSample:
    pairs: np.ndarray
    seed: int = None

    def __post_init__(self):
        self.pairs = np.asarray(self.pairs, dtype=float).reshape(-1, 2)
        if len(self.pairs) < 1:
            raise DomainError("sample is empty", invariant='n >= 1')
        x, y = self.pairs[:, 0], self.pairs[:, 1]
        if not np.all((x > 0) & (y > x)):
            raise DomainError("every pair must satisfy 0 < x < y", invariant='0 < x < y')

    @property
    def n(self):
        return len(self.pairs)

    @property
    def x(self):
        return self.pairs[:, 0]

    @property
    def y(self):
        return self.pairs[:, 1]


@dataclass
class FitResult:
    params: McKayParams
    method: str
    iterations: int
    converged: bool
    loglik: float
    stderr: np.ndarray
    flags: list = field(default_factory=list)
    trace: list = field(default_factory=list)

    def to_dict(self):
        return {'method': self.method, 'alpha1': self.params.alpha1, 'sigma12': self.params.sigma12,
                'alpha2': self.params.alpha2, 'c': self.params.c, 'iterations': self.iterations,
                'converged': self.converged, 'loglik': self.loglik, 'stderr': self.stderr.tolist(),
                'flags': list(self.flags)}


def _rate(p):
    return p if isinstance(p, McKayRateParams) else p.to_rate()


def _draw(rng, rate, n):
    x = rng.gamma(rate.alpha1, 1.0 / rate.c, n)
    y = x + rng.gamma(rate.alpha2, 1.0 / rate.c, n)
    # tiny shapes can round a variate to 0 or y to x; those pairs are redrawn
    bad = ~((x > 0) & (y > x))
    while np.any(bad):
        k = int(bad.sum())
        x[bad] = rng.gamma(rate.alpha1, 1.0 / rate.c, k)
        y[bad] = x[bad] + rng.gamma(rate.alpha2, 1.0 / rate.c, k)
        bad = ~((x > 0) & (y > x))
    return np.column_stack([x, y])


def sample_mckay(p, n, seed):
    """
    Draw n pairs (X, Y) with 0 < X < Y

    Args:
        p: McKayRateParams or McKayParams
        n: Sample size
        seed: Integer seed

    Returns:
        BivariateSample
    """
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n}", invariant='n >= 1')
    return BivariateSample(_draw(np.random.default_rng(seed), _rate(p), int(n)), seed)


def sample_mckay_chunked(p, n, seed, chunks=4, threads=None):
    """
    Sample in independent chunks whose streams are spawned from SeedSequence(seed)

    The result depends on (seed, chunks) only, never on the worker count.
    """
    if n < chunks:
        raise DomainError(f"need at least one draw per chunk, got n={n}, chunks={chunks}",
                          invariant='n >= chunks')
    rate = _rate(p)
    sizes = [n // chunks + (1 if i < n % chunks else 0) for i in range(chunks)]
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(chunks)]
    with ThreadPoolExecutor(max_workers=max(1, threads or THREADS)) as pool:
        parts = list(pool.map(lambda job: _draw(job[0], rate, job[1]), zip(streams, sizes)))
    return BivariateSample(np.vstack(parts), seed)


def write_sample_csv(sample, path):
    write_csv(path, ['x', 'y'], sample.pairs, comments=[f"seed={sample.seed}"])


def read_sample_csv(path):
    comments, header, rows = read_csv(path)
    if header != ['x', 'y']:
        raise DomainError(f"{path}: expected header x,y, got {header}", invariant='header x,y')
    seed = comments.get('seed')
    seed = int(seed) if seed not in (None, 'None') else None
    return BivariateSample(np.array(rows, dtype=float), seed)


def mckay_loglik(sample, p):
    """Sum of McKay log-densities over the sample."""
    a1, s, a2 = p.alpha1, p.sigma12, p.alpha2
    c = p.c
    x, w = sample.x, sample.y - sample.x
    return float(sample.n * ((a1 + a2) * math.log(c) - log_gamma(a1) - log_gamma(a2))
                 + np.sum((a1 - 1) * np.log(x) + (a2 - 1) * np.log(w) - c * sample.y))


def mckay_score(sample, p):
    """Gradient of mckay_loglik in (alpha1, sigma12, alpha2)."""
    a1, s, a2 = p.alpha1, p.sigma12, p.alpha2
    c = p.c
    n = sample.n
    sum_y = float(np.sum(sample.y))
    log_c = math.log(c)
    return np.array([
        n * (log_c + (a1 + a2) / (2 * a1) - digamma(a1)) + float(np.sum(np.log(sample.x))) - c * sum_y / (2 * a1),
        -n * (a1 + a2) / (2 * s) + c * sum_y / (2 * s),
        n * (log_c - digamma(a2)) + float(np.sum(np.log(sample.y - sample.x))),
    ])


def _stderr(p, n):
    return np.sqrt(np.diag(np.linalg.inv(mckay_metric(p))) / n)


def fit_moments(sample):
    """
    Invert the marginal moments: c = mean_x / var_x, alpha1 = mean_x^2 / var_x,
    alpha2 = c mean_y - alpha1, sigma12 = alpha1 / c^2

    A non-positive alpha2 is clamped to a small positive value and flagged.
    """
    if sample.n < MIN_FIT_SAMPLES:
        raise DomainError(f"need at least {MIN_FIT_SAMPLES} pairs, got {sample.n}",
                          invariant=f"n >= {MIN_FIT_SAMPLES}")
    mean_x, var_x = float(np.mean(sample.x)), float(np.var(sample.x))
    if var_x <= 1e-14 * max(mean_x ** 2, 1e-300):
        raise DomainError("sample variance of x vanishes", invariant='var_x > 0')
    c = mean_x / var_x
    alpha1 = mean_x ** 2 / var_x
    alpha2 = c * float(np.mean(sample.y)) - alpha1
    flags = []
    if alpha2 <= 0:
        flags.append(f"alpha2 estimate {alpha2:.6g} clamped")
        logger.warning(f"degenerate sample: alpha2 estimate {alpha2:.6g} clamped to positive")
        alpha2 = 1e-6 * alpha1
    params = McKayRateParams(alpha1, c, alpha2).to_sigma()
    return FitResult(params, 'moments', 0, not flags, mckay_loglik(sample, params),
                     _stderr(params, sample.n), flags)


def fit_mle(sample, init=None, max_iter=MLE_MAX_ITER, tol=MLE_SCORE_TOL):
    """
    Fisher-scoring maximum likelihood

    Each step is theta + step * G(theta)^-1 score / n with step halved until the point is valid
    and the log-likelihood does not decrease.

    Args:
        sample: BivariateSample
        init: Starting McKayParams; defaults to the moment fit
        max_iter: Iteration budget
        tol: Stop when |score| / n falls below this

    Returns:
        FitResult
    """
    if sample.n < MIN_FIT_SAMPLES:
        raise DomainError(f"need at least {MIN_FIT_SAMPLES} pairs, got {sample.n}",
                          invariant=f"n >= {MIN_FIT_SAMPLES}")
    params = init or fit_moments(sample).params
    theta = params.as_array()
    loglik = mckay_loglik(sample, params)
    trace = []
    for it in range(1, max_iter + 1):
        score = mckay_score(sample, params) / sample.n
        norm = float(np.linalg.norm(score))
        trace.append({'iteration': it, 'loglik': loglik, 'score_norm': norm})
        if norm < tol:
            return FitResult(params, 'mle', it, True, loglik, _stderr(params, sample.n), trace=trace)
        direction = np.linalg.solve(mckay_metric(params), score)
        step = 1.0
        for _ in range(40):
            trial = theta + step * direction
            if np.all(trial > 0):
                candidate = McKayParams(*trial)
                trial_loglik = mckay_loglik(sample, candidate)
                if trial_loglik >= loglik - 1e-12 * abs(loglik):
                    break
            step /= 2
        else:
            raise NonConvergenceError("backtracking exhausted without a valid ascent step",
                                      residual=norm, trace=trace)
        theta, params, loglik = trial, candidate, trial_loglik
        logger.debug(f"iteration {it}: loglik {loglik:.12g}, |score| {norm:.3e}, step {step:g}")
    raise NonConvergenceError(f"score norm above {tol:g} after {max_iter} iterations",
                              residual=norm, trace=trace)


def ks_marginal_check(sample, p):
    """
    Kolmogorov-Smirnov test of X against the marginal CDF obtained by integrating f_X

    Returns:
        dict: statistic, pvalue, n
    """
    marginal = mckay_marginals(p).x_params

    def cdf(xs):
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        order = np.argsort(xs)
        edges = np.concatenate([[0.0], xs[order]])
        pieces = [integrate.quad(lambda t: gamma_pdf(t, marginal), lo, hi, limit=200)[0]
                  for lo, hi in zip(edges[:-1], edges[1:])]
        out = np.empty_like(xs)
        out[order] = np.minimum(np.cumsum(pieces), 1.0)
        return out

    res = stats.kstest(sample.x, cdf)
    return {'statistic': float(res.statistic), 'pvalue': float(res.pvalue), 'n': sample.n}


if __name__ == '__main__':
    truth = McKayRateParams(2.0, 1.0, 3.0)
    data = sample_mckay(truth, 10000, 42)
    print(f"[Sampling] moments: {fit_moments(data).params}")
    print(f"[Sampling] mle: {fit_mle(data).params}")
