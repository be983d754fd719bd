from pathlib import Path

from django.conf import settings
from django.test import SimpleTestCase, override_settings

from ogr.exceptions import ConfigurationError
from ogr.features.harness.config import emit_config, load_config, parse_config

MINIMAL = {
    'problem': {'kind': 'quadratic'},
    'optimizers': [{'kind': 'ogr'}],
    'budget': 100,
}

BAD_BETA = """\
name: bad_beta
problem:
  kind: quadratic
  params:
    dim: 4
optimizers:
  - kind: ogr
    params:
      d: 2
      beta: 1.5
budget: 10
"""


def line_containing(text, needle):
    return next(number for number, line in enumerate(text.splitlines(), start=1) if needle in line)


@override_settings(OGR_DEFAULT_STRIDE=1, OGR_MLP_STRIDE=10)
class LoadConfigTests(SimpleTestCase):

    def test_minimal_config_gets_defaults(self):
        config = load_config(MINIMAL)
        self.assertEqual(config.name, 'experiment')
        self.assertEqual(config.seeds, [0])
        self.assertEqual(config.stride, 1)
        self.assertEqual(config.threshold, 1e-6)
        self.assertTrue(config.common_random_numbers)
        spec = config.optimizers[0]
        self.assertEqual(spec.name, 'ogr')
        self.assertEqual(spec.params['d'], 10)
        self.assertEqual(spec.params['warmup_steps'], 30)
        self.assertEqual(spec.params['beta'], 0.9)
        self.assertEqual(config.problem.params['dim'], 10)

    def test_mlp_stride(self):
        config = load_config({**MINIMAL, 'problem': {'kind': 'mlp'}})
        self.assertEqual(config.stride, 10)

    def test_baseline_params(self):
        config = load_config({**MINIMAL, 'optimizers': [{'kind': 'adam', 'name': 'adam_fast', 'params': {'lr': 0.1}}]})
        self.assertEqual(config.optimizers[0].params, {'lr': 0.1, 'beta1': 0.9, 'beta2': 0.999, 'eps': 1e-8})
        self.assertEqual(config.optimizers[0].build_config().kind, 'adam')

    def test_error_keys(self):
        cases = [
            ({**MINIMAL, 'budgett': 5}, 'budgett'),
            ({key: value for key, value in MINIMAL.items() if key != 'budget'}, 'budget'),
            ({**MINIMAL, 'optimizers': [{'kind': 'ogr', 'params': {'mode': 'full'}}]}, 'optimizers.0.params.mode'),
            ({**MINIMAL, 'optimizers': [{'kind': 'ogr', 'params': {'d': 11}}]}, 'optimizers.0.params.d'),
            ({**MINIMAL, 'optimizers': [{'kind': 'ogr'}, {'kind': 'ogr'}]}, 'optimizers.1.name'),
            ({**MINIMAL, 'seeds': [1, 1]}, 'seeds'),
            ({**MINIMAL, 'problem': {'kind': 'quadratic', 'params': {'condition': 0.5}}}, 'problem.params.condition'),
            ({**MINIMAL, 'problem': {'kind': 'plateau', 'params': {'start_offset': 2.0}}},
             'problem.params.start_offset'),
            ({**MINIMAL, 'problem': {'kind': 'sphere'}}, 'problem.kind'),
            ({**MINIMAL, 'optimizers': [{'kind': 'sgd', 'params': {'momentum': 0.5}}]}, 'optimizers.0.params.momentum'),
        ]
        for data, key in cases:
            with self.subTest(key=key):
                with self.assertRaises(ConfigurationError) as caught:
                    load_config(data)
                self.assertEqual(caught.exception.key, key)

    def test_not_a_mapping(self):
        with self.assertRaises(ConfigurationError):
            load_config(['budget', 10])


@override_settings(OGR_DEFAULT_STRIDE=1, OGR_MLP_STRIDE=10)
class ParseConfigTests(SimpleTestCase):

    def test_error_names_key_and_line(self):
        with self.assertRaises(ConfigurationError) as caught:
            parse_config(BAD_BETA)
        self.assertEqual(caught.exception.key, 'optimizers.0.params.beta')
        self.assertEqual(caught.exception.line, line_containing(BAD_BETA, 'beta:'))
        self.assertIn('beta', str(caught.exception))
        self.assertIn(f'line {caught.exception.line}', str(caught.exception))

    def test_missing_key_has_no_line(self):
        with self.assertRaises(ConfigurationError) as caught:
            parse_config('problem: {kind: saddle}\noptimizers: [{kind: sgd}]\n')
        self.assertEqual(caught.exception.key, 'budget')
        self.assertIsNone(caught.exception.line)

    def test_malformed_yaml(self):
        with self.assertRaises(ConfigurationError) as caught:
            parse_config('problem: [kind: quadratic\nbudget: 3\n')
        self.assertIsNotNone(caught.exception.line)

    def test_emitted_config_parses_back(self):
        config = parse_config(BAD_BETA.replace('beta: 1.5', 'beta: 0.5'))
        again = parse_config(emit_config(config))
        self.assertEqual(again.to_dict(), config.to_dict())
        self.assertEqual(again.optimizers[0].params['beta'], 0.5)

    def test_round_trip_with_every_problem(self):
        for kind in ('quadratic', 'saddle', 'rosenbrock', 'plateau', 'mlp'):
            with self.subTest(kind=kind):
                config = load_config({
                    'name': kind,
                    'problem': {'kind': kind},
                    'optimizers': [{'kind': 'sgd'}, {'kind': 'momentum'}, {'kind': 'adam'}],
                    'budget': 5,
                    'seeds': [3, 1],
                })
                self.assertEqual(parse_config(emit_config(config)).to_dict(), config.to_dict())


@override_settings(OGR_DEFAULT_STRIDE=1, OGR_MLP_STRIDE=10)
class ShippedConfigTests(SimpleTestCase):

    def test_every_shipped_config_parses(self):
        paths = sorted((Path(settings.BASE_DIR) / 'configs').glob('*.yaml'))
        self.assertTrue(paths)
        for path in paths:
            with self.subTest(config=path.name):
                config = parse_config(path.read_text())
                self.assertEqual(config.name, path.stem)

    def test_benchmark_configs_share_budget_seeds_and_adam_sweep(self):
        configs = Path(settings.BASE_DIR) / 'configs'
        for stem in ('noisy_quadratic', 'plateau'):
            with self.subTest(config=stem):
                config = parse_config((configs / f'{stem}.yaml').read_text())
                self.assertEqual(config.budget, 5000)
                self.assertEqual(list(config.seeds), list(range(10)))
                adam = {spec.name: spec.params['lr'] for spec in config.optimizers if spec.kind == 'adam'}
                self.assertEqual(adam, {'adam_lr1e-3': 0.001, 'adam_lr1e-2': 0.01, 'adam_lr1e-1': 0.1})
