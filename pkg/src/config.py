"""
Configuration file for the gamma-manifold geometry toolkit
Contains quadrature, pipeline, geodesic and tolerance settings plus logging setup
"""
import logging
import os

from dotenv import load_dotenv

load_dotenv()


def _env_int(name, default):
    return int(os.getenv(name, str(default)))


def _env_float(name, default):
    return float(os.getenv(name, repr(default)))


class QuadratureDefaults:
    """Fisher oracle quadrature settings"""
    abs_tol = 1e-11
    rel_tol = 1e-11
    max_subdivisions = 2000
    tail_cutoff_mass = 1e-14    # probability mass allowed beyond the truncation point


class PipelineDefaults:
    """Finite-difference settings of the curvature pipeline"""
    relative_step = 1e-3        # central-difference step as a fraction of |coordinate|
    richardson_levels = 2       # number of step halvings combined by extrapolation
    singular_threshold = 1e-12  # |denominator| / term scale below which a value is flagged


class GeodesicDefaults:
    """Geodesic integration and shooting settings"""
    steps = 256
    min_steps = 16
    shooting_tol = 1e-10
    shooting_max_iter = 50
    polyline_nodes = 64
    refine_grid = 9             # coarse grid per axis for distance-to-slice searches


class Tolerances:
    """Acceptance tolerances used by the comparison routines"""
    metric_abs = 1e-5
    five_metric_abs = 1e-4
    inverse_abs = 1e-10
    curvature_rel = 1e-7
    curvature_abs = 1e-9
    geodesic_rel = 1e-5


# Runtime
THREADS = _env_int('GAMMAGEOM_THREADS', 1)                  # workers for sweeps and oracle grids
LOG_LEVEL = os.getenv('GAMMAGEOM_LOG_LEVEL', 'INFO')
TUBE_RADIUS = _env_float('GAMMAGEOM_TUBE_RADIUS', 0.2)      # tubular neighbourhood radius around the exponential curve
SCHEMA_VERSION = '1.0'                                      # written into every JSON report
CSV_DIGITS = 17                                             # significant digits in CSV output

# Estimation
MLE_MAX_ITER = 200
MLE_SCORE_TOL = 1e-8
MIN_FIT_SAMPLES = 10
SAMPLE_DEFAULT_PARAMS = {'a1': 2.0, 's12': 2.0, 'a2': 3.0}  # McKay point for `sample` without --params (c = 1)


def setup_logging(level=None):
    """
    Install the console handler used by the command line tools

    Args:
        level: Logging level name or number; defaults to GAMMAGEOM_LOG_LEVEL
    """
    root = logging.getLogger()
    if not any(getattr(h, '_gammageom', False) for h in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter('[%(name)s] %(message)s'))
        handler._gammageom = True
        root.addHandler(handler)
    root.setLevel(level or LOG_LEVEL)
