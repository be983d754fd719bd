from dataclasses import replace
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from ogr.exceptions import ConfigurationError, RunFailure
from ogr.features.harness.config import parse_config
from ogr.features.harness.services import run_experiment

EXIT_CONFIG = 1
EXIT_RUN_FAILURE = 2


def parse_seeds(text):
    try:
        seeds = [int(part) for part in text.split(',') if part.strip()]
    except ValueError as exc:
        raise ConfigurationError(f'expected comma-separated integers, got {text!r}', key='seeds') from exc
    if not seeds or any(seed < 0 for seed in seeds) or len(set(seeds)) != len(seeds):
        raise ConfigurationError(f'seeds must be distinct non-negative integers, got {text!r}', key='seeds')
    return seeds


class Command(BaseCommand):
    help = 'Run every (optimizer, seed) pair of an experiment and write CSV traces plus summary.json'

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='YAML experiment configuration')
        parser.add_argument('--out', help='output directory (default: config "out" or OGR_OUTPUT_ROOT/<name>)')
        parser.add_argument('--seeds', help='comma-separated seeds overriding the config, e.g. 1,2,3')
        parser.add_argument('--parallel', type=int, default=1, help='number of concurrent runs')
        parser.add_argument('--no-progress', action='store_true', help='hide the progress bar')

    def handle(self, *args, **options):
        try:
            text = Path(options['config']).read_text()
        except OSError as exc:
            raise CommandError(f'cannot read config {options["config"]}: {exc}', returncode=EXIT_CONFIG)

        try:
            config = parse_config(text)
            if options['seeds']:
                config = replace(config, seeds=parse_seeds(options['seeds']))
        except ConfigurationError as exc:
            raise CommandError(f'configuration error: {exc}', returncode=EXIT_CONFIG)

        out = Path(options['out'] or config.out or Path(settings.OGR_OUTPUT_ROOT) / config.name)
        try:
            traces = run_experiment(
                config,
                out=out,
                parallel=max(1, options['parallel']),
                progress=not options['no_progress'],
            )
        except RunFailure as exc:
            raise CommandError(str(exc), returncode=EXIT_RUN_FAILURE)

        for trace in traces:
            if trace.failed:
                self.stdout.write(self.style.ERROR(f'{trace.label}: FAILED ({trace.error})'))
            else:
                self.stdout.write(
                    f'{trace.label}: final objective {trace.final_objective!r}, '
                    f'best {trace.best_objective!r}, {trace.evaluations} evaluations'
                )

        failed = [trace.label for trace in traces if trace.failed]
        if failed:
            raise CommandError(f'{len(failed)} of {len(traces)} runs failed: {", ".join(failed)}',
                               returncode=EXIT_RUN_FAILURE)
        self.stdout.write(self.style.SUCCESS(f'Wrote {len(traces)} traces to {out}'))
