"""
Geodesics and information distance
Integrates the geodesic equation x'' + Gamma(x', x') = 0 on any MetricField, solves the
two-point problem by shooting with a polyline energy fallback, and measures distances to
coordinate slices (departures from randomness and independence on the McKay manifold).
"""
import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from tqdm import tqdm

from config import GeodesicDefaults
from distributions import McKayParams, mckay_correlation
from errors import ChartExitError, DomainError, NonConvergenceError
from geometry_core import christoffels, metric_derivs
from metric_fields import mckay_field

logger = logging.getLogger(__name__)

_MAX_STEPS = 2 ** 14


@dataclass
class GeodesicPath:
    times: np.ndarray
    points: np.ndarray
    velocities: np.ndarray
    step_count: int
    energy: float

    def speeds(self, mfield):
        """g(v, v) at every node."""
        return np.array([v @ np.asarray(mfield.metric_at(x)) @ v for x, v in zip(self.points, self.velocities)])

    def speed_drift(self, mfield):
        """max |g(v, v)(t) - g(v, v)(0)| relative to the initial energy"""
        s = self.speeds(mfield)
        return float(np.max(np.abs(s - s[0])) / max(abs(s[0]), 1e-300))


@dataclass
class ShootingResult:
    initial_velocity: np.ndarray
    distance: float
    converged: bool
    residual: float
    method: str = 'shooting'
    iterations: int = 0
    polyline: np.ndarray = None


@dataclass
class SliceDistance:
    distance: float
    foot: np.ndarray
    boundary_minimum: bool
    label: str = ''
    evaluations: int = 0
    extras: dict = field(default_factory=dict)


def _acceleration(mfield, x, v):
    return -np.einsum('kij,i,j->k', christoffels(mfield, x), v, v)


def _rk4(mfield, x0, v0, t_end, steps):
    h = t_end / steps
    xs, vs = [x0], [v0]
    x, v = x0, v0
    for n in range(steps):
        try:
            k1x, k1v = v, _acceleration(mfield, x, v)
            k2x, k2v = v + 0.5 * h * k1v, _acceleration(mfield, x + 0.5 * h * k1x, v + 0.5 * h * k1v)
            k3x, k3v = v + 0.5 * h * k2v, _acceleration(mfield, x + 0.5 * h * k2x, v + 0.5 * h * k2v)
            k4x, k4v = v + h * k3v, _acceleration(mfield, x + h * k3x, v + h * k3v)
        except DomainError as exc:
            raise ChartExitError(f"geodesic left the {mfield.name} chart near t = {n * h:.6g}: {exc}",
                                 last_point=x, last_velocity=v, last_time=n * h) from exc
        x = x + h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        v = v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        if not mfield.contains(x):
            raise ChartExitError(f"geodesic left the {mfield.name} chart at t = {(n + 1) * h:.6g}",
                                 last_point=xs[-1], last_velocity=vs[-1], last_time=n * h)
        xs.append(x)
        vs.append(v)
    return np.array(xs), np.array(vs)


def integrate_geodesic(mfield, x0, v0, t_end=1.0, steps=GeodesicDefaults.steps, adaptive_tol=None):
    """
    Fixed-step fourth-order Runge-Kutta integration of the geodesic equation

    Args:
        mfield: MetricField
        x0: Start point inside the chart
        v0: Initial velocity
        t_end: Parameter length
        steps: Number of steps (>= 16)
        adaptive_tol: When set, steps are doubled until the endpoint moves less than this

    Returns:
        GeodesicPath
    """
    if steps < GeodesicDefaults.min_steps:
        raise DomainError(f"need at least {GeodesicDefaults.min_steps} steps, got {steps}",
                          invariant=f"steps >= {GeodesicDefaults.min_steps}")
    x0 = mfield.check(x0)
    v0 = np.asarray(v0, dtype=float)
    xs, vs = _rk4(mfield, x0, v0, t_end, steps)
    if adaptive_tol is not None:
        while True:
            if 2 * steps > _MAX_STEPS:
                raise NonConvergenceError(f"step budget {_MAX_STEPS} exhausted before endpoint tolerance "
                                          f"{adaptive_tol:g}", residual=None)
            xs2, vs2 = _rk4(mfield, x0, v0, t_end, 2 * steps)
            change = float(np.max(np.abs(xs2[-1] - xs[-1])))
            steps, xs, vs = 2 * steps, xs2, vs2
            if change <= adaptive_tol:
                break
    energy = float(v0 @ np.asarray(mfield.metric_at(x0)) @ v0)
    return GeodesicPath(np.linspace(0.0, t_end, steps + 1), xs, vs, steps, energy)


def _endpoint(mfield, p, v, steps):
    return _rk4(mfield, p, v, 1.0, steps)[0][-1]


def _sensitivity(mfield, p, v, base, steps):
    """Endpoint Jacobian with respect to the initial velocity by forward differences."""
    h = 1e-7 * max(1.0, float(np.linalg.norm(v)))
    jac = np.empty((len(v), len(v)))
    for i in range(len(v)):
        dv = np.zeros(len(v))
        dv[i] = h
        try:
            jac[:, i] = (_endpoint(mfield, p, v + dv, steps) - base) / h
        except ChartExitError:
            jac[:, i] = (base - _endpoint(mfield, p, v - dv, steps)) / h
    return jac


def shoot(mfield, p, q, steps=GeodesicDefaults.steps, tol=GeodesicDefaults.shooting_tol,
          max_iter=GeodesicDefaults.shooting_max_iter):
    """
    Damped Newton shooting on the initial velocity, started from the chart straight line

    Returns:
        ShootingResult: converged is False when Newton stalls or exhausts max_iter
    """
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    v = q - p
    try:
        end = _endpoint(mfield, p, v, steps)
    except ChartExitError:
        return ShootingResult(v, float('nan'), False, float('inf'))
    residual = float(np.linalg.norm(end - q))
    it = 0
    for it in range(1, max_iter + 1):
        if residual < tol:
            break
        delta = np.linalg.lstsq(_sensitivity(mfield, p, v, end, steps), q - end, rcond=None)[0]
        damping, accepted = 1.0, False
        while damping >= 1.0 / 64:
            trial = v + damping * delta
            try:
                trial_end = _endpoint(mfield, p, trial, steps)
            except ChartExitError:
                damping /= 2
                continue
            trial_residual = float(np.linalg.norm(trial_end - q))
            if trial_residual < residual:
                v, end, residual, accepted = trial, trial_end, trial_residual, True
                break
            damping /= 2
        if not accepted:
            logger.debug(f"shooting stalled at residual {residual:.3e} after {it} iterations")
            break
    converged = residual < tol
    distance = math.sqrt(max(float(v @ np.asarray(mfield.metric_at(p)) @ v), 0.0))
    return ShootingResult(v, distance, converged, residual, 'shooting', it)


def _polyline_energy(flat, mfield, p, q, nodes, penalty):
    path = np.vstack([p, flat.reshape(nodes - 1, len(p)), q])
    d = np.diff(path, axis=0)
    mids = 0.5 * (path[1:] + path[:-1])
    if not all(mfield.contains(m) for m in path[1:-1]) or not all(mfield.contains(m) for m in mids):
        return penalty, np.zeros_like(flat)
    g = np.array([mfield.metric_at(m) for m in mids])
    dg = np.array([metric_derivs(mfield, m) for m in mids])
    gd = np.einsum('kij,kj->ki', g, d)
    quad = np.einsum('kaij,ki,kj->ka', dg, d, d)
    energy = nodes * float(np.einsum('ki,ki->', d, gd))
    end_side = 2.0 * gd + 0.5 * quad      # derivative with respect to the segment's end node
    start_side = -2.0 * gd + 0.5 * quad   # ... and its start node
    grad = nodes * (end_side[:-1] + start_side[1:])
    return energy, grad.ravel()


def geodesic_energy_polyline(mfield, p, q, nodes=GeodesicDefaults.polyline_nodes, max_iter=500):
    """
    Minimize the discrete path energy N * sum g(mid)(dx, dx) over an N-segment polyline

    The gradient is assembled from the analytic metric derivatives and handed to L-BFGS-B.

    Returns:
        ShootingResult: distance is the polyline length, polyline the optimized nodes
    """
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    start = np.linspace(p, q, nodes + 1)[1:-1].ravel()
    straight, _ = _polyline_energy(start, mfield, p, q, nodes, float('inf'))
    penalty = 1e6 * (1.0 + straight)
    res = optimize.minimize(_polyline_energy, start, args=(mfield, p, q, nodes, penalty), jac=True,
                            method='L-BFGS-B', options={'maxiter': max_iter, 'gtol': 1e-10})
    path = np.vstack([p, res.x.reshape(nodes - 1, len(p)), q])
    d = np.diff(path, axis=0)
    mids = 0.5 * (path[1:] + path[:-1])
    length = float(sum(math.sqrt(max(di @ np.asarray(mfield.metric_at(m)) @ di, 0.0)) for di, m in zip(d, mids)))
    if not res.success:
        logger.warning(f"polyline energy minimization stopped: {res.message}")
    return ShootingResult(nodes * d[0], length, bool(res.success), 0.0, 'polyline', int(res.nit), path)


def geodesic_distance(mfield, p, q, steps=GeodesicDefaults.steps):
    """
    Length of the connecting geodesic found by shooting, or of the energy-minimizing polyline
    when shooting stalls

    Args:
        mfield: MetricField
        p, q: Points inside the chart

    Returns:
        ShootingResult
    """
    p, q = mfield.check(p), mfield.check(q)
    if np.array_equal(p, q):
        return ShootingResult(np.zeros_like(p), 0.0, True, 0.0, 'shooting', 0)
    result = shoot(mfield, p, q, steps)
    if result.converged:
        return result
    logger.info(f"shooting {tuple(p)} -> {tuple(q)} stalled (residual {result.residual:.3e}), "
                f"falling back to polyline energy")
    fallback = geodesic_energy_polyline(mfield, p, q)
    if not fallback.converged and math.isfinite(result.distance):
        return result
    return fallback


def distance_to_submanifold(mfield, p, fixed_axis, fixed_value, search_box,
                            grid=GeodesicDefaults.refine_grid, steps=GeodesicDefaults.steps,
                            progress=False):
    """
    Geodesic distance from p to the slice x[fixed_axis] = fixed_value

    A coarse grid over search_box is followed by a bounded Nelder-Mead refinement.

    Args:
        mfield: MetricField
        p: Point inside the chart
        fixed_axis: Index of the constrained coordinate
        fixed_value: Its value on the slice
        search_box: (lo, hi) per free coordinate, in axis order
        grid: Coarse points per free axis

    Returns:
        SliceDistance: boundary_minimum is set when the foot point sits on the box edge
    """
    p = mfield.check(p)
    free = [i for i in range(mfield.dim) if i != fixed_axis]
    box = np.asarray(search_box, dtype=float)
    if box.shape != (len(free), 2) or np.any(box[:, 0] >= box[:, 1]):
        raise DomainError(f"search_box needs one (lo, hi) per free axis, got {search_box!r}",
                          invariant='lo < hi per free axis')

    def assemble(y):
        x = np.empty(mfield.dim)
        x[free] = y
        x[fixed_axis] = fixed_value
        return x

    if p[fixed_axis] == fixed_value and np.all((box[:, 0] <= p[free]) & (p[free] <= box[:, 1])):
        return SliceDistance(0.0, p.copy(), False)
    count = [0]

    def dist(y):
        count[0] += 1
        target = assemble(y)
        if not mfield.contains(target):
            return float('inf')
        return geodesic_distance(mfield, p, target, steps).distance

    axes = [np.linspace(lo, hi, grid) for lo, hi in box]
    cells = list(itertools.product(*axes))
    values = [dist(np.array(c)) for c in tqdm(cells, desc=f"slice x{fixed_axis + 1}", disable=not progress)]
    best = np.array(cells[int(np.nanargmin(values))])
    res = optimize.minimize(dist, best, method='Nelder-Mead', bounds=[tuple(b) for b in box],
                            options={'xatol': 1e-6, 'fatol': 1e-10, 'maxiter': 200})
    foot_free, distance = (res.x, float(res.fun)) if res.fun <= min(values) else (best, float(min(values)))
    span = box[:, 1] - box[:, 0]
    at_edge = bool(np.any((foot_free - box[:, 0] <= 1e-6 * span) | (box[:, 1] - foot_free <= 1e-6 * span)))
    if at_edge:
        logger.warning(f"distance to slice x{fixed_axis + 1} = {fixed_value} attained on the search box edge")
    return SliceDistance(distance, assemble(foot_free), at_edge, evaluations=count[0])


def _default_box(center, factor=4.0):
    return [(c / factor, c * factor) for c in center]


def departure_from_randomness(p, search_box=None, grid=GeodesicDefaults.refine_grid,
                              steps=GeodesicDefaults.steps):
    """Distance on the McKay manifold from p to the alpha1 = 1 slice (exponential X-marginal)."""
    box = search_box or _default_box((p.sigma12, p.alpha2))
    found = distance_to_submanifold(mckay_field(), p.as_array(), 0, 1.0, box, grid, steps)
    found.label = 'alpha1 = 1 (exponential X-marginal)'
    return found


def departure_from_independence(p, alpha2_target=50.0, search_box=None, grid=GeodesicDefaults.refine_grid,
                                steps=GeodesicDefaults.steps):
    """
    Distance from p toward small correlation, measured to the slice alpha2 = alpha2_target

    The McKay correlation is never zero; the slice is a constructed window and is labeled so.
    """
    box = search_box or _default_box((p.alpha1, p.sigma12))
    found = distance_to_submanifold(mckay_field(), p.as_array(), 2, alpha2_target, box, grid, steps)
    rho = mckay_correlation(McKayParams(*found.foot))
    found.label = f"constructed window: alpha2 = {alpha2_target:g}, rho at foot {rho:.4g}"
    found.extras['rho_at_foot'] = rho
    return found


if __name__ == '__main__':
    field_ = mckay_field()
    result = geodesic_distance(field_, (1.0, 1.0, 1.0), (2.0, 1.0, 3.0))
    print(f"[Geodesy] distance {result.distance:.8f}, converged {result.converged}, "
          f"residual {result.residual:.2e}")
