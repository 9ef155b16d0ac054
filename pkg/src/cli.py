"""
Command line front end
Every subcommand validates its parameters before computing, writes CSV or JSON atomically,
and returns 0 (ok), 2 (domain violation), 3 (computed but flagged) or 4 (non-convergence).
"""
import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from tqdm import tqdm

from closed_forms import (SubmanifoldId, five_manifold_metric, mckay_mean, mckay_metric,
                          mckay_scalar_along_ray, mckay_scalar_at, mckay_scalar_ray_limit,
                          mckay_sectional, scalar_vs_rho_curve, submanifold_geometry)
from config import SAMPLE_DEFAULT_PARAMS, THREADS, TUBE_RADIUS, setup_logging
from distributions import FiveGammaParams, GammaParams, LogGammaParams, McKayParams
from errors import DomainError, GammaGeometryError, NonConvergenceError
from geodesy import departure_from_independence, departure_from_randomness, geodesic_distance
from geometry_core import invert_metric
from immersion import TubeSpec, certify_alpha_interval, gamma_metric_2d, immersion_surface_grid
from metric_fields import FIELDS, gamma_field, submanifold_field
from output import csv_text, json_text, write_csv, write_json
from sampling_estimation import (fit_mle, fit_moments, ks_marginal_check, read_sample_csv,
                                 sample_mckay, sample_mckay_chunked, write_sample_csv)
from verification import compare_mckay, compare_submanifold, erratum_report, oracle_check

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_DOMAIN, EXIT_FLAGGED, EXIT_NONCONVERGENCE = 0, 2, 3, 4

PARAM_NAMES = {'a1': 'alpha1', 'a2': 'alpha2', 's12': 'sigma12', 'g1': 'gamma1', 'g2': 'gamma2',
               'mu': 'mu', 'alpha': 'alpha', 'beta': 'beta', 'rho': 'rho', 'eps': 'eps'}
MODELS = ('gamma', 'loggamma', 'gamma_natural', 'mckay', 'mckay5', 'm1', 'm2', 'm3')

# chart coordinates of every model, as short names
MODEL_COORDS = {
    'gamma': ('alpha', 'beta'),
    'loggamma': ('alpha', 'beta'),
    'gamma_natural': ('mu', 'alpha'),
    'mckay': ('a1', 's12', 'a2'),
    'mckay5': ('a1', 'a2', 's12', 'g1', 'g2'),
    'm1': ('s12', 'a2'),
    'm2': ('a1', 's12'),
    'm3': ('a1', 'a2'),
}
_OPTIONAL_ZERO = {'g1', 'g2'}


@dataclass
class RunConfig:
    command: str
    model: str = None
    params: dict = field(default_factory=dict)
    grids: dict = field(default_factory=dict)
    output: str = None
    fmt: str = 'json'
    seed: int = None
    tolerance: float = None
    progress: bool = False


def parse_params(text):
    """'a1=1,s12=2' -> {'a1': 1.0, 's12': 2.0}"""
    params = {}
    for item in filter(None, (text or '').split(',')):
        name, sep, value = item.partition('=')
        name = name.strip()
        if not sep or name not in PARAM_NAMES:
            raise DomainError(f"bad parameter {item!r}; known names: {', '.join(PARAM_NAMES)}",
                              invariant='name=value with a known name')
        try:
            params[name] = float(value)
        except ValueError:
            raise DomainError(f"parameter {name} is not a number: {value!r}", invariant='numeric value') from None
    return params


def parse_grid(text):
    """'name=lo:hi:count' -> (name, np.linspace(lo, hi, count))"""
    name, sep, spec = text.partition('=')
    parts = spec.split(':')
    if not sep or len(parts) != 3:
        raise DomainError(f"grid must read name=lo:hi:count, got {text!r}", invariant='name=lo:hi:count')
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise DomainError(f"grid bounds must be numbers, got {text!r}", invariant='numeric grid') from None
    if count < 2 or not lo < hi:
        raise DomainError(f"grid {name} needs count >= 2 and lo < hi", invariant='count >= 2, lo < hi')
    return name.strip(), np.linspace(lo, hi, count)


def parse_list(text):
    return [float(v) for v in text.split(',') if v.strip()]


def chart_point(model, params):
    """Chart coordinates of model from short-name params, validated against the model domain."""
    if model not in MODEL_COORDS:
        raise DomainError(f"model {model} has no Fisher metric chart", invariant=f"model in {sorted(MODEL_COORDS)}")
    missing = [n for n in MODEL_COORDS[model] if n not in params and n not in _OPTIONAL_ZERO]
    if missing:
        raise DomainError(f"model {model} needs parameters {', '.join(missing)}", invariant='complete params')
    point = tuple(params.get(n, 0.0) for n in MODEL_COORDS[model])
    if model == 'mckay':
        McKayParams(*point)
    elif model == 'mckay5':
        FiveGammaParams(*point)
    elif model in ('m1', 'm2', 'm3'):
        SubmanifoldId.parse(model)
        if any(not v > 0 for v in point):
            raise DomainError(f"{model} coordinates must be positive, got {point}", invariant='coords > 0')
    elif model == 'gamma':
        GammaParams(*point)
    elif model == 'loggamma':
        LogGammaParams(*point)
    elif any(not v > 0 for v in point):
        raise DomainError(f"{model} coordinates must be positive, got {point}", invariant='mu, alpha > 0')
    return point


def _emit(cfg, payload=None, header=None, rows=None, comments=()):
    """Write JSON (payload) or CSV (header, rows) to cfg.output, or stdout when no path is given."""
    if cfg.fmt == 'csv' and header is not None:
        if cfg.output:
            write_csv(cfg.output, header, rows, comments)
        else:
            sys.stdout.write(csv_text(header, rows, comments))
    else:
        if cfg.output:
            write_json(cfg.output, payload)
        else:
            sys.stdout.write(json_text(payload))


def closed_metric(model, point):
    if model == 'mckay':
        return mckay_metric(McKayParams(*point))
    if model == 'mckay5':
        return five_manifold_metric(FiveGammaParams(*point))
    if model in ('m1', 'm2', 'm3'):
        return submanifold_geometry(model, point).metric
    if model == 'gamma_natural':
        return gamma_metric_2d(*point)
    return gamma_field().metric_at(np.asarray(point))


def cmd_metric(cfg, inverse=False):
    point = chart_point(cfg.model, cfg.params)
    g = closed_metric(cfg.model, point)
    payload = {'model': cfg.model, 'coordinates': list(MODEL_COORDS[cfg.model]), 'point': list(point),
               'metric': g}
    n = len(g)
    header = [f"g{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    row = list(g.ravel())
    if inverse:
        ginv = invert_metric(g)
        payload['inverse'] = ginv
        header += [f"ginv{i + 1}{j + 1}" for i in range(n) for j in range(n)]
        row += list(ginv.ravel())
    _emit(cfg, payload, header, [row])
    return EXIT_OK


_OBJECT_PREFIXES = (('ginv', 'inverse'), ('Gamma', 'christoffels'), ('Ric', 'ricci'), ('R', 'riemann'),
                    ('scalar', 'scalar'), ('sec', 'sectional'), ('mean', 'mean'), ('g', 'metric'))


def _object_of(name):
    for prefix, obj in _OBJECT_PREFIXES:
        if name.startswith(prefix):
            return obj
    return name


def cmd_curvature(cfg, objects=None, corrected=False):
    point = chart_point(cfg.model, cfg.params)
    if cfg.model == 'mckay':
        report = compare_mckay(McKayParams(*point), corrected)
    elif cfg.model in ('m1', 'm2', 'm3'):
        report = compare_submanifold(cfg.model, point, corrected)
    else:
        raise DomainError(f"closed-form curvature exists for mckay, m1, m2, m3, not {cfg.model}",
                          invariant='model in {mckay, m1, m2, m3}')
    entries = [e for e in report.entries if not objects or _object_of(e.name) in objects]
    payload = {'model': cfg.model, 'point': list(point), 'corrected': corrected,
               'all_agree': all(e.agree for e in entries), 'flags': report.flags,
               'entries': [vars(e) for e in entries]}
    header = ['name', 'printed', 'pipeline', 'abs_dev', 'rel_dev', 'agree']
    rows = [[e.name, e.printed, e.pipeline, e.abs_dev, e.rel_dev, e.agree] for e in entries]
    _emit(cfg, payload, header, rows)
    return EXIT_OK if payload['all_agree'] and not report.flags else EXIT_FLAGGED


def _sweep_row(model, fixed, names, values, objects):
    params = dict(fixed)
    params.update(zip(names, values))
    if model == 'm3':
        point = chart_point('m3', params)
        return list(values) + [submanifold_geometry('m3', point).scalar]
    p = McKayParams(*chart_point('mckay', params))
    row = list(values) + [mckay_scalar_at(p.alpha1, p.alpha2)]
    if 'sectional' in objects:
        row += list(mckay_sectional(p).values())
    if 'mean' in objects:
        row += list(mckay_mean(p).values())
    return row


def cmd_sweep(cfg, objects=()):
    if cfg.model not in ('mckay', 'm3'):
        raise DomainError(f"sweep supports mckay and m3, not {cfg.model}", invariant='model in {mckay, m3}')
    if len(cfg.grids) != 2:
        raise DomainError("sweep needs exactly two --grid options", invariant='two grids')
    names = list(cfg.grids)
    unknown = [n for n in names if n not in MODEL_COORDS[cfg.model]]
    if unknown:
        raise DomainError(f"cannot sweep {unknown} on {cfg.model}", invariant='grid over chart coordinates')
    cells = [(u, v) for u in cfg.grids[names[0]] for v in cfg.grids[names[1]]]
    # validate fixed parameters and both grid corners before the sweep starts
    for corner in (cells[0], cells[-1]):
        _sweep_row(cfg.model, cfg.params, names, corner, ())
    header = names + ['scalar']
    if cfg.model == 'mckay':
        header += ['sec12', 'sec13', 'sec23'] if 'sectional' in objects else []
        header += ['mean1', 'mean2', 'mean3'] if 'mean' in objects else []
    with ThreadPoolExecutor(max_workers=max(1, THREADS)) as pool:
        rows = list(tqdm(pool.map(lambda c: _sweep_row(cfg.model, cfg.params, names, c, objects), cells),
                         total=len(cells), desc=f"sweep {cfg.model}", disable=not cfg.progress))
    _emit(cfg, {'model': cfg.model, 'header': header, 'rows': rows}, header, rows)
    return EXIT_OK


def cmd_rho_curve(cfg):
    if cfg.model not in ('m1', 'm2'):
        raise DomainError(f"rho curves exist for m1 and m2, not {cfg.model}", invariant='model in {m1, m2}')
    rho = cfg.grids.get('rho')
    if rho is None:
        raise DomainError("rho-curve needs --grid rho=lo:hi:count", invariant='rho grid')
    if rho[0] <= 0 or rho[-1] >= 1:
        raise DomainError("rho grid must lie inside (0, 1)", invariant='0 < rho < 1')
    rows = [list(r) for r in scalar_vs_rho_curve(cfg.model.upper(), rho)]
    _emit(cfg, {'model': cfg.model, 'rows': rows}, ['rho', 'R'], rows)
    return EXIT_OK


def cmd_immersion(cfg, radius=TUBE_RADIUS, certify=False):
    tube = TubeSpec(radius)
    if certify:
        window = (cfg.params.get('mu', 1.0),) * 2 if 'mu' in cfg.params else (0.5, 2.0)
        _emit(cfg, certify_alpha_interval(radius, window))
        return EXIT_OK
    if 'mu' not in cfg.grids or 'alpha' not in cfg.grids:
        raise DomainError("immersion needs --grid mu=... and --grid alpha=...", invariant='mu and alpha grids')
    if cfg.grids['mu'][0] <= 0 or cfg.grids['alpha'][0] <= 0:
        raise DomainError("immersion grids must be positive", invariant='mu, alpha > 0')
    surface = immersion_surface_grid(cfg.grids['mu'], cfg.grids['alpha'], tube, cfg.progress)
    header = ['mu', 'alpha', 'beta', 'z', 'dist_to_exp_curve', 'in_tube']
    rows = [[r.mu, r.alpha, r.beta, r.z, r.dist_to_exp_curve, r.in_tube] for r in surface]
    _emit(cfg, {'radius': radius, 'header': header, 'rows': rows}, header, rows)
    return EXIT_OK


def cmd_oracle_check(cfg):
    model = cfg.model
    point = chart_point(model, cfg.params)
    result = oracle_check(model, point, cfg.tolerance)
    _emit(cfg, result)
    return EXIT_OK if result['within_tol'] else EXIT_FLAGGED


def cmd_geodesic(cfg, target=None, polyline=False, slice_kind=None):
    model = cfg.model or 'mckay'
    if model not in FIELDS and model not in ('m1', 'm2', 'm3'):
        raise DomainError(f"no metric field for {model}", invariant='known model')
    start = chart_point(model, cfg.params)
    if slice_kind:
        if model != 'mckay':
            raise DomainError("slice distances are defined on the mckay model", invariant='model mckay')
        p = McKayParams(*start)
        found = departure_from_randomness(p) if slice_kind == 'randomness' else departure_from_independence(p)
        _emit(cfg, {'model': model, 'from': list(start), 'slice': found.label, 'distance': found.distance,
                    'foot': found.foot, 'boundary_minimum': found.boundary_minimum, **found.extras})
        return EXIT_FLAGGED if found.boundary_minimum else EXIT_OK
    end = chart_point(model, parse_params(target))
    mfield = submanifold_field(model.upper()) if model in ('m1', 'm2', 'm3') else FIELDS[model]()
    result = geodesic_distance(mfield, start, end)
    payload = {'model': model, 'from': list(start), 'to': list(end), 'distance': result.distance,
               'converged': result.converged, 'residual': result.residual, 'method': result.method,
               'initial_velocity': result.initial_velocity}
    if polyline and result.polyline is not None:
        payload['polyline'] = result.polyline
    _emit(cfg, payload)
    if not result.converged:
        raise NonConvergenceError(f"geodesic {start} -> {end} did not converge", residual=result.residual)
    return EXIT_OK


def cmd_sample(cfg, n=1000, chunks=1):
    p = McKayParams(*chart_point('mckay', {**SAMPLE_DEFAULT_PARAMS, **cfg.params}))
    seed = 42 if cfg.seed is None else cfg.seed
    sample = sample_mckay(p, n, seed) if chunks == 1 else sample_mckay_chunked(p, n, seed, chunks)
    if cfg.output:
        write_sample_csv(sample, cfg.output)
    else:
        sys.stdout.write(csv_text(['x', 'y'], sample.pairs, [f"seed={seed}"]))
    return EXIT_OK


def cmd_fit(cfg, path, method='both', ks=False):
    sample = read_sample_csv(path)
    fits = {}
    if method in ('moments', 'both'):
        fits['moments'] = fit_moments(sample)
    if method in ('mle', 'both'):
        fits['mle'] = fit_mle(sample, fits['moments'].params if 'moments' in fits else None)
    payload = {'n': sample.n, 'seed': sample.seed, 'fits': {k: f.to_dict() for k, f in fits.items()}}
    if ks:
        payload['ks'] = ks_marginal_check(sample, list(fits.values())[-1].params)
    _emit(cfg, payload)
    return EXIT_FLAGGED if any(f.flags for f in fits.values()) else EXIT_OK


def cmd_limit(cfg, slopes, eps):
    if any(not k > 0 for k in slopes) or any(not e > 0 for e in eps):
        raise DomainError("ray slopes and eps values must be positive", invariant='k, eps > 0')
    rows = [[k, e, value, mckay_scalar_ray_limit(k)] for k in slopes for e, value in mckay_scalar_along_ray(k, eps)]
    _emit(cfg, {'rows': rows}, ['k', 'eps', 'scalar', 'limit'], rows)
    return EXIT_OK


def cmd_errata(cfg, corrected=False):
    report = erratum_report(corrected=corrected)
    _emit(cfg, report.to_dict())
    return EXIT_FLAGGED if report.errata else EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--output', '-o', help='output file (stdout when omitted)')
    common.add_argument('--format', dest='fmt', choices=('csv', 'json'), default='json')
    common.add_argument('--quiet', '-q', action='store_true', help='warnings only, no progress bars')
    common.add_argument('--log-level', default=None, help='logging level name')
    common.add_argument('--model', choices=MODELS, default='mckay')
    common.add_argument('--params', default='', help='a1=..,s12=..,a2=..,g1=..,g2=..,mu=..,alpha=..,beta=..')
    common.add_argument('--grid', action='append', default=[], help='name=lo:hi:count (repeatable)')

    parser = argparse.ArgumentParser(prog='gammageom', description='Information geometry of gamma manifolds',
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('metric', parents=[common], help='Fisher metric of a model')
    p.add_argument('--inverse', action='store_true')
    p = sub.add_parser('curvature', parents=[common], help='printed vs pipeline curvature')
    p.add_argument('--objects', default='', help='comma list: metric,inverse,christoffels,riemann,ricci,'
                                                 'scalar,sectional,mean')
    p.add_argument('--corrected', action='store_true', help='use the repaired formulas')
    p = sub.add_parser('sweep', parents=[common], help='scalar curvature surface')
    p.add_argument('--objects', default='', help='extra mckay columns: sectional,mean')
    sub.add_parser('rho-curve', parents=[common], help='M1/M2 scalar against correlation')
    p = sub.add_parser('immersion', parents=[common], help='affine immersion surface and tube membership')
    p.add_argument('--radius', type=float, default=TUBE_RADIUS)
    p.add_argument('--certify', action='store_true', help='certify an alpha interval inside the tube')
    p = sub.add_parser('oracle-check', parents=[common], help='closed-form metric vs quadrature oracle')
    p.add_argument('--tol', type=float, default=None)
    p = sub.add_parser('geodesic', parents=[common], help='geodesic distance')
    p.add_argument('--from', dest='source', default=None, help='start point (overrides --params)')
    p.add_argument('--to', dest='target', default=None)
    p.add_argument('--polyline', action='store_true')
    p.add_argument('--slice', choices=('randomness', 'independence'), default=None)
    p = sub.add_parser('sample', parents=[common], help='draw a McKay sample')
    p.add_argument('-n', type=int, default=1000)
    p.add_argument('--seed', type=int, default=42)
    p.add_argument('--chunks', type=int, default=1)
    p = sub.add_parser('fit', parents=[common], help='fit McKay parameters to a sample CSV')
    p.add_argument('--input', required=True)
    p.add_argument('--method', choices=('moments', 'mle', 'both'), default='both')
    p.add_argument('--ks', action='store_true', help='add a KS check of the X-marginal')
    p = sub.add_parser('limit', parents=[common], help='McKay scalar along rays alpha2 = k alpha1')
    p.add_argument('--slopes', default='1', help='comma list of k')
    p.add_argument('--eps', default='0.1,0.01,0.001,0.0001', help='comma list of alpha1 values')
    p = sub.add_parser('errata', parents=[common], help='suspected printing errors over the standard grid')
    p.add_argument('--corrected', action='store_true')
    return parser


def _dispatch(args, cfg):
    command = args.command
    if command == 'metric':
        return cmd_metric(cfg, args.inverse)
    if command == 'curvature':
        return cmd_curvature(cfg, set(filter(None, args.objects.split(','))), args.corrected)
    if command == 'sweep':
        return cmd_sweep(cfg, set(filter(None, args.objects.split(','))))
    if command == 'rho-curve':
        return cmd_rho_curve(cfg)
    if command == 'immersion':
        return cmd_immersion(cfg, args.radius, args.certify)
    if command == 'oracle-check':
        return cmd_oracle_check(cfg)
    if command == 'geodesic':
        if args.source:
            cfg.params = parse_params(args.source)
        if not args.slice and not args.target:
            raise DomainError("geodesic needs --to or --slice", invariant='target given')
        return cmd_geodesic(cfg, args.target, args.polyline, args.slice)
    if command == 'sample':
        return cmd_sample(cfg, args.n, args.chunks)
    if command == 'fit':
        return cmd_fit(cfg, args.input, args.method, args.ks)
    if command == 'limit':
        return cmd_limit(cfg, parse_list(args.slopes), parse_list(args.eps))
    return cmd_errata(cfg, args.corrected)


def main(argv=None):
    args = build_parser().parse_args(argv)
    setup_logging('WARNING' if args.quiet else args.log_level)
    try:
        grids = dict(parse_grid(g) for g in args.grid)
        cfg = RunConfig(args.command, args.model, parse_params(args.params), grids, args.output, args.fmt,
                        getattr(args, 'seed', None), getattr(args, 'tol', None),
                        progress=not args.quiet and sys.stderr.isatty())
        code = _dispatch(args, cfg)
    except NonConvergenceError as exc:
        logger.error(f"did not converge: {exc}")
        return EXIT_NONCONVERGENCE
    except DomainError as exc:
        logger.error(f"domain violation ({exc.invariant}): {exc}")
        return EXIT_DOMAIN
    except GammaGeometryError as exc:
        logger.error(str(exc))
        return EXIT_DOMAIN
    except OSError as exc:
        logger.error(f"cannot read or write {exc.filename}: {exc.strerror}")
        return EXIT_DOMAIN
    if code == EXIT_FLAGGED:
        logger.warning("computed, but flagged: see the report")
    return code


if __name__ == '__main__':
    sys.exit(main())
