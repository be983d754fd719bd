import numpy as np
import yaml
from django.core.management.base import BaseCommand, CommandError

from ogr.exceptions import ConfigurationError
from ogr.features.problems.services import PROBLEM_KINDS, finite_diff_check, make_problem

# (h, tol) per problem kind
DEFAULT_TOLERANCES = {
    'quadratic': (1e-4, 1e-9),
    'saddle': (1e-5, 1e-6),
    'rosenbrock': (1e-6, 1e-6),
    'plateau': (1e-5, 1e-6),
    'mlp': (1e-5, 1e-5),
}


def check_point(problem, seed):
    """Seeded random point for the analytic problems, the seeded initialization for the MLP."""
    if problem.kind == 'mlp':
        return problem.initial_point(seed)
    return np.random.default_rng(seed).standard_normal(problem.dim)


class Command(BaseCommand):
    help = 'Compare analytic gradients with central finite differences'

    def add_arguments(self, parser):
        parser.add_argument('--problem', required=True, choices=PROBLEM_KINDS)
        parser.add_argument('--params', default='{}', help='YAML mapping of problem params, e.g. "{dim: 5}"')
        parser.add_argument('--h', type=float, help='difference step')
        parser.add_argument('--tol', type=float, help='maximum relative error')
        parser.add_argument('--seed', type=int, default=0, help='seed of the check point')

    def handle(self, *args, **options):
        kind = options['problem']
        default_h, default_tol = DEFAULT_TOLERANCES[kind]
        h = options['h'] or default_h
        tol = options['tol'] or default_tol
        try:
            params = yaml.safe_load(options['params']) or {}
            problem = make_problem(kind, params)
        except (yaml.YAMLError, ConfigurationError) as exc:
            raise CommandError(f'configuration error: {exc}', returncode=1)

        report = finite_diff_check(problem, check_point(problem, options['seed']), h=h, tol=tol)
        message = f'{kind} (D={problem.dim}): max relative error {report.max_rel_error:.3e} (tol {tol:g}, h {h:g})'
        if not report.passed:
            raise CommandError(f'gradient check FAILED: {message}', returncode=2)
        self.stdout.write(self.style.SUCCESS(f'gradient check passed: {message}'))
