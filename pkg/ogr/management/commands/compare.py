from django.conf import settings
from django.core.management.base import BaseCommand

from ogr.features.harness.traces import compare_summaries, load_summaries


def _fmt(value):
    if value is None:
        return '-'
    if isinstance(value, float):
        return f'{value:.4g}'
    return str(value)


class Command(BaseCommand):
    help = 'Print median results per optimizer from every summary.json under a directory'

    def add_arguments(self, parser):
        parser.add_argument('--out', help='directory to search (default: OGR_OUTPUT_ROOT)')

    def handle(self, *args, **options):
        directory = options['out'] or settings.OGR_OUTPUT_ROOT
        summaries = load_summaries(directory)
        if not summaries:
            self.stdout.write(self.style.WARNING(f'No summary.json found under {directory}'))
            return

        rows, flags = compare_summaries(summaries)
        header = ('experiment', 'optimizer', 'runs', 'failed', 'median_final',
                  'median_gap', 'best', 'median_steps_to_thr')
        table = [header] + [
            (row.experiment, row.optimizer, row.runs, row.failures, row.median_final_objective,
             row.median_gap, row.best_objective, row.median_steps_to_threshold)
            for row in rows
        ]
        cells = [[_fmt(value) for value in line] for line in table]
        widths = [max(len(line[i]) for line in cells) for i in range(len(header))]
        for line in cells:
            self.stdout.write('  '.join(cell.ljust(width) for cell, width in zip(line, widths)))

        for flag in flags:
            self.stdout.write(self.style.WARNING(flag))
        if not flags:
            self.stdout.write(self.style.SUCCESS('No regressions flagged'))
