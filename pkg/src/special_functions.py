"""
Log-gamma and the polygamma functions psi, psi', psi''
Every metric and curvature formula evaluates these at positive shape parameters.
Values come from scipy.special; the wrappers enforce the positive real domain.
"""
import numpy as np
from scipy import special

from errors import DomainError


def _checked(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"{name} requires finite x > 0, got {x!r}", invariant='x > 0')
    return arr


def _as_output(value, x):
    return float(value) if np.ndim(x) == 0 else value


def log_gamma(x):
    """ln Gamma(x) for x > 0 (scalar or array)."""
    arr = _checked(x, 'log_gamma')
    return _as_output(special.gammaln(arr), x)


def digamma(x):
    """psi(x) = Gamma'(x)/Gamma(x) for x > 0."""
    arr = _checked(x, 'digamma')
    return _as_output(special.digamma(arr), x)


def trigamma(x):
    """psi'(x); positive and strictly decreasing on x > 0."""
    arr = _checked(x, 'trigamma')
    return _as_output(special.polygamma(1, arr), x)


def tetragamma(x):
    """psi''(x); negative and strictly increasing on x > 0."""
    arr = _checked(x, 'tetragamma')
    return _as_output(special.polygamma(2, arr), x)


def polygamma(order, x):
    """
    Dispatch on the derivative order of the digamma function

    Args:
        order: 0, 1 or 2
        x: Positive argument

    Returns:
        psi, psi' or psi'' at x
    """
    funcs = {0: digamma, 1: trigamma, 2: tetragamma}
    if order not in funcs:
        raise DomainError(f"polygamma order must be 0, 1 or 2, got {order}",
                          invariant='order in {0,1,2}')
    return funcs[order](x)


if __name__ == '__main__':
    for x in (0.5, 1.0, 2.0, 10.5):
        print(f"[Special] x={x}: lnG={log_gamma(x):.12f} psi={digamma(x):.12f} "
              f"psi'={trigamma(x):.12f} psi''={tetragamma(x):.12f}")
