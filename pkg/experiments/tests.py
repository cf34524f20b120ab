import json
import math
import os
import tempfile
from io import StringIO

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase, override_settings

from dynamics.channels import cnot_channel, swap_channel
from dynamics.serializers import JointChannelSerializer

from .models import ExperimentRun
from .renderers import ReportRenderer, render
from .runner import RunResult
from .serializers import ExperimentConfigSerializer, first_error
from .suites import SUITES

FAST = {
    'DEFAULT_SEED': 0,
    'DEFAULT_TRIALS': 500,
    'DEFAULT_SAMPLES': 2000,
    'DEFAULT_TOLERANCE': 1e-9,
    'DEFAULT_UNITS': 'nats',
    'DEFAULT_WORKERS': 1,
    'SAMPLER_CHUNK': 2 ** 18,
    'SAMPLER_SEEDS': 2,
}

DIAG = {'matrix': [[0.5, 0.0], [0.0, 0.5]]}
IDENTITY = {'matrix': [[1.0, 0.0], [0.0, 1.0]]}
ONE_BY_TWO = {
    'channel': {'dim_system': 1, 'dim_env': 2, 'matrix': [[1.0, 0.0], [0.0, 1.0]]},
    'joint': {'matrix': [[0.5, 0.5]]},
    'preparation': {'matrix': [[1.0]]},
}


def corrstoch(*args):
    out = StringIO()
    call_command('corrstoch', *args, stdout=out)
    return out.getvalue()


def without_timestamp(text):
    doc = json.loads(text)
    doc.pop('generated_at')
    return doc


class RendererTests(SimpleTestCase):
    def test_seventeen_significant_digits(self):
        text = ReportRenderer().render({'x': 0.1, 'one': 1.0, 'n': 3})
        self.assertIn('0.10000000000000001', text.decode())
        self.assertEqual(json.loads(text), {'x': 0.1, 'one': 1.0, 'n': 3})
        self.assertIn('1.0', text.decode())

    def test_infinities_become_strings(self):
        doc = json.loads(ReportRenderer().render({'a': math.inf, 'b': [-math.inf]}))
        self.assertEqual(doc, {'a': '+inf', 'b': ['-inf']})

    def test_nan_is_refused(self):
        with self.assertRaises(ValueError):
            ReportRenderer().render({'a': math.nan})

    def test_json_render_ends_with_newline(self):
        self.assertTrue(render(RunResult({'a': 1})).endswith('}\n'))


@override_settings(CORRSTOCH=FAST)
class ConfigSerializerTests(SimpleTestCase):
    def test_defaults_come_from_settings(self):
        cfg = ExperimentConfigSerializer.build({'mode': 'check'})
        self.assertEqual((cfg.trials, cfg.samples, cfg.dims), (500, 2000, (2, 2)))

    def test_negative_trials(self):
        serializer = ExperimentConfigSerializer(data={'mode': 'check', 'trials': -3})
        self.assertFalse(serializer.is_valid())
        self.assertEqual(first_error(serializer.errors)[0], 'trials')

    def test_tolerance_must_be_positive(self):
        serializer = ExperimentConfigSerializer(data={'mode': 'check', 'tolerance': 0})
        self.assertFalse(serializer.is_valid())
        self.assertIn('tolerance', serializer.errors)

    def test_dimensions_of_at_least_two(self):
        serializer = ExperimentConfigSerializer(data={'mode': 'check', 'dims': [1, 2]})
        self.assertFalse(serializer.is_valid())
        self.assertEqual(first_error(serializer.errors)[0], 'dims.0')

    def test_random_instance_is_json_only(self):
        serializer = ExperimentConfigSerializer(data={'mode': 'random-instance', 'output': 'csv'})
        self.assertFalse(serializer.is_valid())
        self.assertIn('output', serializer.errors)

    def test_inline_instance_sets_dimensions(self):
        cfg = ExperimentConfigSerializer.build({
            'mode': 'secondlaw',
            'instance': {
                'channel': JointChannelSerializer(cnot_channel()).data,
                'joint': DIAG,
                'preparation': IDENTITY,
            },
        })
        self.assertEqual(cfg.dims, (2, 2))
        self.assertIsNotNone(cfg.instance)

    def test_nested_errors_name_the_path(self):
        serializer = ExperimentConfigSerializer(data={
            'mode': 'secondlaw',
            'instance': {
                'channel': JointChannelSerializer(cnot_channel()).data,
                'joint': {'matrix': [[0.5, 0.6], [0.0, 0.0]]},
                'preparation': IDENTITY,
            },
        })
        self.assertFalse(serializer.is_valid())
        self.assertEqual(first_error(serializer.errors)[0], 'instance.joint.matrix')

    def test_inline_instance_below_two_states_is_rejected(self):
        serializer = ExperimentConfigSerializer(data={'mode': 'secondlaw', 'instance': ONE_BY_TWO})
        self.assertFalse(serializer.is_valid())
        self.assertEqual(first_error(serializer.errors)[0], 'instance')


@override_settings(CORRSTOCH=FAST)
class CommandTests(SimpleTestCase):
    def _config_file(self, data):
        fh = tempfile.NamedTemporaryFile('w', suffix='.json', delete=False)
        json.dump(data, fh)
        fh.close()
        self.addCleanup(os.unlink, fh.name)
        return fh.name

    def test_demo(self):
        doc = json.loads(corrstoch('demo'))
        self.assertEqual(doc['schema_version'], 1)
        self.assertTrue(doc['passed'])
        self.assertEqual(doc['demos']['cnot']['q_a'], [1.0, 0.0])
        self.assertEqual(doc['demos']['cnot']['q_b'], [0.0, 1.0])
        self.assertAlmostEqual(doc['demos']['swap']['conditional_map_discrepancy'], 2.0)
        self.assertAlmostEqual(doc['demos']['spohn']['second_law']['lhs'], 0.3251, delta=1e-3)

    def test_demo_in_bits(self):
        doc = json.loads(corrstoch('demo', '--units', 'bits'))
        self.assertAlmostEqual(doc['demos']['swap']['second_law']['lhs'], 1.0, places=12)

    def test_check_passes_every_suite(self):
        doc = json.loads(corrstoch('check', '--trials', '8', '--seed', '42'))
        self.assertTrue(doc['passed'])
        self.assertEqual([s['name'] for s in doc['suites']], [s.name for s in SUITES])
        by_name = {s['name']: s for s in doc['suites']}
        self.assertEqual(by_name['kl_contractivity']['trials'], 8)
        self.assertEqual(by_name['naive_map_failure']['trials'], 1)
        self.assertEqual(by_name['sampler_convergence']['trials'], 2)
        self.assertAlmostEqual(by_name['naive_map_failure']['worst'], 2.0)

    def test_check_is_deterministic_across_runs_and_workers(self):
        first = without_timestamp(corrstoch('check', '--trials', '6', '--seed', '3'))
        second = without_timestamp(corrstoch('check', '--trials', '6', '--seed', '3'))
        threaded = without_timestamp(corrstoch('check', '--trials', '6', '--seed', '3', '--workers', '3'))
        self.assertEqual(first, second)
        self.assertEqual(first['suites'], threaded['suites'])

    def test_check_csv(self):
        text = corrstoch('check', '--trials', '4', '--output', 'csv')
        lines = text.strip().splitlines()
        self.assertEqual(lines[0], 'suite,trials,passed,failed,worst,ok')
        self.assertEqual(len(lines), len(SUITES) + 1)

    def test_negative_trials_exit_two(self):
        with self.assertRaises(CommandError) as ctx:
            corrstoch('check', '--trials', '-1')
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('trials', str(ctx.exception))

    def test_missing_mode_exit_two(self):
        with self.assertRaises(CommandError) as ctx:
            corrstoch()
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('mode', str(ctx.exception))

    def test_undersized_inline_instance_exit_two(self):
        path = self._config_file({'mode': 'secondlaw', 'instance': ONE_BY_TWO})
        with self.assertRaises(CommandError) as ctx:
            corrstoch('--config', path)
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('instance', str(ctx.exception))

    def test_unreadable_config_exit_two(self):
        with self.assertRaises(CommandError) as ctx:
            corrstoch('demo', '--config', '/nonexistent/corrstoch.json')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_flags_override_the_config_file(self):
        path = self._config_file({'mode': 'random-instance', 'dims': [3, 2], 'seed': 5})
        doc = json.loads(corrstoch('--config', path, '--seed', '6', '--dim-env', '3'))
        self.assertEqual(doc['config']['seed'], 6)
        self.assertEqual(doc['config']['dims'], [3, 3])
        self.assertEqual(doc['instance']['channel']['dim_system'], 3)
        self.assertEqual(len(doc['instance']['channel']['matrix']), 9)

    def test_random_instance_is_reproducible(self):
        a = without_timestamp(corrstoch('random-instance', '--seed', '11'))
        b = without_timestamp(corrstoch('random-instance', '--seed', '11'))
        c = without_timestamp(corrstoch('random-instance', '--seed', '12'))
        self.assertEqual(a, b)
        self.assertNotEqual(a['instance'], c['instance'])

    def test_secondlaw_on_inline_instance(self):
        path = self._config_file({
            'mode': 'secondlaw',
            'instance': {
                'channel': JointChannelSerializer(swap_channel()).data,
                'joint': DIAG,
                'preparation': IDENTITY,
            },
        })
        doc = json.loads(corrstoch('--config', path))
        self.assertTrue(doc['second_law']['satisfied'])
        self.assertAlmostEqual(doc['second_law']['lhs'], math.log(2), places=12)
        self.assertEqual(len(doc['second_law']['epsilon']), 4)

    def test_secondlaw_on_random_instance(self):
        doc = json.loads(corrstoch('secondlaw', '--seed', '4', '--dim-system', '3'))
        self.assertTrue(doc['passed'])
        self.assertEqual(len(doc['lifted_map']['matrix']['matrix']), 9)

    def test_tomography_of_swap(self):
        path = self._config_file({
            'mode': 'tomography',
            'samples': 5000,
            'instance': {
                'channel': JointChannelSerializer(swap_channel()).data,
                'joint': DIAG,
                'preparation': IDENTITY,
            },
        })
        doc = json.loads(corrstoch('--config', path))
        self.assertTrue(doc['passed'])
        self.assertEqual(doc['reconstruction']['cells_within_5_sigma'], 1.0)
        self.assertEqual(doc['empirical']['samples'], 5000)

    def test_tomography_with_unreachable_cell_exits_one(self):
        path = self._config_file({
            'mode': 'tomography',
            'samples': 200,
            'instance': {
                'channel': JointChannelSerializer(cnot_channel()).data,
                'joint': {'matrix': [[0.5, 0.5], [0.0, 0.0]]},
                'preparation': IDENTITY,
            },
        })
        out = StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command('corrstoch', '--config', path, stdout=out)
        self.assertEqual(ctx.exception.returncode, 1)
        doc = json.loads(out.getvalue())
        self.assertEqual(doc['error']['cell'], [0, 1])


@override_settings(CORRSTOCH=FAST)
class RecordTests(TestCase):
    def test_record_stores_the_report(self):
        corrstoch('random-instance', '--seed', '18446744073709551615', '--record')
        run = ExperimentRun.objects.get()
        self.assertEqual(run.mode, 'random-instance')
        self.assertEqual(run.seed, '18446744073709551615')
        self.assertTrue(run.passed)
        self.assertEqual(run.report['schema_version'], 1)
