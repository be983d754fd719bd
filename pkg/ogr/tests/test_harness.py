import csv
import json
import tempfile
from pathlib import Path

from django.test import SimpleTestCase, override_settings

from ogr.features.harness.config import load_config
from ogr.features.harness.models import TRACE_COLUMNS, RunTrace
from ogr.features.harness.services import run_experiment, run_payload, run_single
from ogr.features.harness.traces import compare_summaries, load_summaries, write_trace
from ogr.tasks import execute_run


def experiment(**overrides):
    data = {
        'name': 'noisy',
        'problem': {'kind': 'quadratic', 'params': {'dim': 6, 'condition': 10.0, 'noise': 0.05, 'seed': 1}},
        'optimizers': [
            {'kind': 'ogr', 'params': {'d': 2}},
            {'kind': 'sgd', 'params': {'lr': 0.05}},
            {'kind': 'adam', 'params': {'lr': 0.05}},
        ],
        'budget': 40,
        'seeds': [0, 1],
    }
    data.update(overrides)
    return load_config(data)


def read_rows(path):
    with open(path, newline='') as handle:
        return list(csv.reader(handle))


def without_timing(trace):
    data = trace.to_dict()
    data.pop('wall_time')
    return data


@override_settings(OGR_DEFAULT_STRIDE=1, OGR_MLP_STRIDE=10, CELERY_TASK_ALWAYS_EAGER=True)
class RunSingleTests(SimpleTestCase):

    def test_budget_counts_gradient_evaluations(self):
        config = experiment(stride=3)
        for index in range(len(config.optimizers)):
            trace = run_single(config, index, seed=0)
            self.assertIsNone(trace.error)
            self.assertEqual(trace.evaluations, 40)
            self.assertEqual(len(trace.rows), 40 // 3)
            self.assertEqual([row.step for row in trace.rows], list(range(3, 40, 3)))

    def test_best_is_the_smallest_recorded_objective(self):
        trace = run_single(experiment(stride=2), 0, seed=1)
        self.assertEqual(trace.best_objective, min(row.objective for row in trace.rows))
        self.assertEqual(trace.final_gap, trace.final_objective)

    def test_noiseless_quadratic_is_solved_within_budget(self):
        config = load_config({
            'problem': {'kind': 'quadratic', 'params': {'dim': 10, 'condition': 10.0}},
            'optimizers': [{'kind': 'ogr', 'params': {'d': 10, 'alpha': 1.0}}],
            'budget': 200,
            'threshold': 1e-8,
        })
        trace = run_single(config, 0, seed=0)
        self.assertIsNone(trace.error)
        self.assertLessEqual(trace.final_gap, 1e-8)
        self.assertIsNotNone(trace.steps_to_threshold)
        self.assertLessEqual(trace.steps_to_threshold, 200)

    def test_diverging_run_is_recorded_not_raised(self):
        config = load_config({
            'problem': {'kind': 'rosenbrock'},
            'optimizers': [{'kind': 'sgd', 'params': {'lr': 1.0}}, {'kind': 'adam', 'params': {'lr': 0.01}}],
            'budget': 50,
        })
        with self.assertLogs('ogr.features.harness.services', level='ERROR'):
            failed = run_single(config, 0, seed=0)
        self.assertTrue(failed.failed)
        self.assertIn('FloatingPointError', failed.error)
        self.assertLess(failed.evaluations, 50)
        healthy = run_single(config, 1, seed=0)
        self.assertFalse(healthy.failed)

    def test_common_random_numbers(self):
        optimizers = [
            {'kind': 'sgd', 'name': 'first', 'params': {'lr': 0.05}},
            {'kind': 'sgd', 'name': 'second', 'params': {'lr': 0.05}},
        ]
        shared = experiment(optimizers=optimizers)
        self.assertEqual(run_single(shared, 0, 0).final_objective, run_single(shared, 1, 0).final_objective)
        separate = experiment(optimizers=optimizers, common_random_numbers=False)
        self.assertNotEqual(run_single(separate, 0, 0).final_objective, run_single(separate, 1, 0).final_objective)


@override_settings(OGR_DEFAULT_STRIDE=1, OGR_MLP_STRIDE=10, CELERY_TASK_ALWAYS_EAGER=True)
class RunExperimentTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_traces_in_optimizer_then_seed_order(self):
        traces = run_experiment(experiment())
        self.assertEqual([trace.label for trace in traces], [
            'ogr_seed0', 'ogr_seed1', 'sgd_seed0', 'sgd_seed1', 'adam_seed0', 'adam_seed1',
        ])

    def test_writes_csv_and_summary(self):
        config = experiment(stride=5)
        traces = run_experiment(config, out=self.out)
        rows = read_rows(self.out / 'ogr_seed0.csv')
        self.assertEqual(tuple(rows[0]), TRACE_COLUMNS)
        self.assertEqual(len(rows) - 1, 40 // 5)

        summary = json.loads((self.out / 'summary.json').read_text())
        self.assertEqual(summary['experiment'], 'noisy')
        self.assertEqual(summary['objective_floor'], 0.0)
        self.assertEqual(summary['config'], config.to_dict())
        self.assertEqual(len(summary['runs']), len(traces))
        for run in summary['runs']:
            objectives = [float(row[1]) for row in read_rows(self.out / run['trace'])[1:]]
            self.assertEqual(run['best_objective'], min(objectives))
            self.assertEqual(run['recorded_rows'], len(objectives))

    def test_header_only_trace_when_stride_exceeds_steps(self):
        run_experiment(experiment(stride=100), out=self.out)
        self.assertEqual(read_rows(self.out / 'sgd_seed1.csv'), [list(TRACE_COLUMNS)])

    def test_repeat_runs_write_identical_files(self):
        config = experiment()
        first, second = self.out / 'first', self.out / 'second'
        run_experiment(config, out=first)
        run_experiment(config, out=second)
        for path in sorted(first.glob('*.csv')):
            self.assertEqual(path.read_bytes(), (second / path.name).read_bytes())

    def test_task_matches_direct_call(self):
        config = experiment()
        payload = {'config': config.to_dict(), 'optimizer_index': 0, 'seed': 1}
        direct = run_payload(payload)
        queued = execute_run.apply(args=(payload,)).get()
        direct.pop('wall_time')
        queued.pop('wall_time')
        self.assertEqual(direct, queued)

    def test_unwritable_output_is_a_run_failure(self):
        from ogr.exceptions import RunFailure

        blocker = self.out / 'file'
        blocker.write_text('')
        with self.assertRaises(RunFailure):
            write_trace(RunTrace(optimizer='sgd', kind='sgd', seed=0), blocker / 'sub')


def summary(experiment_name, runs):
    return {'experiment': experiment_name, 'runs': [
        {'optimizer': name, 'kind': kind, 'final_objective': gap, 'final_gap': gap,
         'best_objective': gap, 'steps_to_threshold': steps, 'error': error}
        for name, kind, gap, steps, error in runs
    ]}


class CompareSummariesTests(SimpleTestCase):

    def test_medians_per_optimizer(self):
        rows, flags = compare_summaries([summary('q', [
            ('ogr', 'ogr', 1e-6, 10, None),
            ('ogr', 'ogr', 3e-6, None, None),
            ('ogr', 'ogr', 2e-6, 30, None),
            ('adam', 'adam', 1e-3, None, None),
        ])])
        ogr = rows[0]
        self.assertEqual(ogr.runs, 3)
        self.assertEqual(ogr.median_gap, 2e-6)
        self.assertEqual(ogr.median_steps_to_threshold, 30.0)
        self.assertEqual(ogr.best_objective, 1e-6)
        self.assertEqual(flags, [])

    def test_flags_ogr_behind_best_adam(self):
        _, flags = compare_summaries([summary('noisy', [
            ('ogr', 'ogr', 1e-2, None, None),
            ('adam_slow', 'adam', 1e-1, None, None),
            ('adam_fast', 'adam', 1e-3, None, None),
        ])])
        self.assertEqual(len(flags), 1)
        self.assertTrue(flags[0].startswith('REGRESSION noisy: ogr'))

    def test_failures_are_counted_and_excluded(self):
        rows, flags = compare_summaries([summary('q', [
            ('ogr', 'ogr', None, None, 'FloatingPointError: overflow'),
            ('adam', 'adam', 1e-3, None, None),
        ])])
        self.assertEqual(rows[0].failures, 1)
        self.assertIsNone(rows[0].median_gap)
        self.assertEqual(len(flags), 1)

    def test_without_adam_nothing_is_flagged(self):
        _, flags = compare_summaries([summary('q', [('ogr', 'ogr', 1.0, None, None), ('sgd', 'sgd', 0.0, 5, None)])])
        self.assertEqual(flags, [])

    def test_load_summaries_walks_directories(self):
        with tempfile.TemporaryDirectory() as tmp:
            for name in ('b', 'a'):
                directory = Path(tmp) / name
                directory.mkdir()
                (directory / 'summary.json').write_text(json.dumps(summary(name, [])))
            (Path(tmp) / 'broken').mkdir()
            (Path(tmp) / 'broken' / 'summary.json').write_text('{')
            with self.assertLogs('ogr.features.harness.traces', level='WARNING'):
                loaded = load_summaries(tmp)
        self.assertEqual([item['experiment'] for item in loaded], ['a', 'b'])
