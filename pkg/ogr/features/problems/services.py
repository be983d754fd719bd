import logging

import numpy as np

from ...exceptions import ConfigurationError, ContractViolation
from ...serializers import validate_or_raise
from ..utils import as_vector, step_seed
from .models import MLP, GradCheckReport, Plateau, Quadratic, Rosenbrock, Saddle
from .serializers import PROBLEM_PARAMS_SERIALIZERS

logger = logging.getLogger(__name__)

PROBLEM_KINDS = tuple(PROBLEM_PARAMS_SERIALIZERS)


def validate_problem_params(kind, params, prefix='params'):
    """Kind-specific params with defaults filled in."""
    if kind not in PROBLEM_PARAMS_SERIALIZERS:
        raise ConfigurationError(f'unknown problem {kind!r}; choose from {PROBLEM_KINDS}', key='kind')
    return validate_or_raise(PROBLEM_PARAMS_SERIALIZERS[kind], params or {}, prefix=prefix)


def make_problem(kind, params=None):
    """Build a problem from its kind and (possibly partial) params."""
    params = validate_problem_params(kind, params)
    try:
        if kind == 'quadratic':
            if params['hessian'] is not None:
                return Quadratic(params['hessian'], params['center'], params['noise'])
            return Quadratic.random(
                params['dim'],
                condition=params['condition'],
                min_eigenvalue=params['min_eigenvalue'],
                seed=params['seed'],
                noise=params['noise'],
                center=params['center'],
            )
        if kind == 'saddle':
            return Saddle(params['curvatures'], params['center'], params['quartic'], params['noise'])
        if kind == 'rosenbrock':
            return Rosenbrock(params['dim'], params['a'], params['b'], params['noise'])
        if kind == 'plateau':
            return Plateau(
                params['dim'], params['height'], params['width'],
                params['center'], params['start_offset'], params['noise'],
            )
        return MLP(**params)
    except ConfigurationError as exc:
        if exc.key and not exc.key.startswith('params.'):
            raise ConfigurationError(exc.message, key=f'params.{exc.key}') from exc
        raise


def oracle_eval(problem, theta, noise_seed):
    """Stochastic gradient at θ; a pure function of (θ, noise_seed)."""
    theta = as_vector(theta, problem.dim, name='theta')
    if not np.all(np.isfinite(theta)):
        raise ContractViolation('oracle needs finite parameters')
    return problem.stochastic_gradient(theta, noise_seed)


class GradientOracle:
    """
    A problem bound to a per-call noise-seed stream.

    Call n draws its noise from seed material (*stream, n), so two oracles
    with the same stream see the same noise at the same call index. Only
    gradient calls count toward ``evaluations``.
    """

    def __init__(self, problem, stream=(0,)):
        self.problem = problem
        self.stream = tuple(int(key) for key in stream)
        self.evaluations = 0

    def gradient(self, theta):
        g = oracle_eval(self.problem, theta, step_seed(*self.stream, self.evaluations))
        self.evaluations += 1
        return g

    def objective(self, theta):
        return self.problem.objective(theta)

    def __repr__(self):
        return f'GradientOracle({self.problem!r}, stream={self.stream}, evaluations={self.evaluations})'


def finite_diff_check(problem, theta, h=1e-6, tol=1e-6):
    """
    Central differences of the objective against the exact gradient.

    The relative error is ‖fd − g‖∞ / max(‖g‖∞, ‖fd‖∞), floored at the
    smallest normal float.
    """
    if h <= 0.0:
        raise ConfigurationError(f'must be positive, got {h}', key='h')
    theta = as_vector(theta, problem.dim, name='theta')
    analytic = problem.gradient(theta)
    numeric = np.empty(problem.dim)
    for i in range(problem.dim):
        shift = np.zeros(problem.dim)
        shift[i] = h
        numeric[i] = (problem.objective(theta + shift) - problem.objective(theta - shift)) / (2.0 * h)

    scale = max(np.max(np.abs(analytic)), np.max(np.abs(numeric)), np.finfo(np.float64).tiny)
    max_rel_error = float(np.max(np.abs(numeric - analytic)) / scale)
    passed = max_rel_error <= tol
    logger.info(f'Gradient check on {problem!r}: max relative error {max_rel_error:.3e} '
                f'(tol {tol:g}, h {h:g}) -> {"pass" if passed else "FAIL"}')
    return GradCheckReport(
        max_rel_error=max_rel_error,
        passed=passed,
        h=h,
        tol=tol,
        analytic=analytic,
        numeric=numeric,
    )
