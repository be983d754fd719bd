from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from django.test.utils import get_runner


class Command(BaseCommand):
    help = 'Run the oracle-equivalence and invariant test suites'

    def add_arguments(self, parser):
        parser.add_argument('labels', nargs='*', help='test labels (default: OGR_SELFTEST_LABELS)')
        parser.add_argument('--failfast', action='store_true')

    def handle(self, *args, **options):
        labels = options['labels'] or settings.OGR_SELFTEST_LABELS
        runner_class = get_runner(settings)
        runner = runner_class(verbosity=options['verbosity'], interactive=False, failfast=options['failfast'])
        failures = runner.run_tests(labels)
        if failures:
            raise CommandError(f'selftest failed: {failures} failing test(s)', returncode=3)
        self.stdout.write(self.style.SUCCESS(f'selftest passed ({", ".join(labels)})'))
