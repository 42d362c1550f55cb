import json
import logging
import unittest
from pathlib import Path
from typing import Any, Sequence

from click.testing import CliRunner, Result
from parameterized import parameterized

from avalanche.cli import main, catch_exceptions
from avalanche.config import ConfigurationError
from avalanche.error import UserFacingError
from avalanche.logging import CliHandler
from avalanche.tests import TestCase
from avalanche.verify import COLUMNS


def _invoke(args: Sequence[str], **kwargs: Any) -> Result:
    return CliRunner().invoke(main, args, catch_exceptions=False, **kwargs)


def _write_json(file_path: str, data: Any) -> None:
    with open(file_path, 'w') as f:
        json.dump(data, f)


class CliTestCase(TestCase):
    def setUp(self) -> None:
        self._runner = CliRunner()
        self._isolation = self._runner.isolated_filesystem()
        self._isolation.__enter__()

    def tearDown(self) -> None:
        self._isolation.__exit__(None, None, None)
        root = logging.getLogger()
        for handler in [handler for handler in root.handlers if isinstance(handler, CliHandler)]:
            root.removeHandler(handler)


class MainTest(CliTestCase):
    def test_help(self) -> None:
        result = _invoke(('--help',))
        self.assertEqual(0, result.exit_code)
        self.assertIn('verify', result.output)

    def test_version(self) -> None:
        result = _invoke(('--version',))
        self.assertEqual(0, result.exit_code)
        self.assertIn('Avalanche, version', result.output)

    def test_verbose_and_quiet(self) -> None:
        result = _invoke(('-v', '-q', 'table', 'polygon'))
        self.assertEqual(2, result.exit_code)

    def test_with_unknown_configuration_file(self) -> None:
        result = _invoke(('-c', 'non-existent-avalanche.json', 'table', 'polygon'))
        self.assertEqual(2, result.exit_code)

    def test_with_invalid_configuration(self) -> None:
        _write_json('avalanche.json', {'samples': 0})
        result = _invoke(('verify',))
        self.assertEqual(2, result.exit_code)

    def test_with_discovered_configuration(self) -> None:
        with open('avalanche.yaml', 'w') as f:
            f.write('pairs:\n  - [4, 1]\nns: [3]\nsamples: 2\n')
        result = _invoke(('verify',))
        self.assertEqual(0, result.exit_code)
        self.assertEqual(2, len(result.output.splitlines()))

    def test_with_configuration_file(self) -> None:
        _write_json('sweep.json', {'pairs': [[4, 1]], 'ns': [3], 'samples': 3, 'format': 'csv'})
        result = _invoke(('-c', 'sweep.json', 'verify'))
        self.assertEqual(0, result.exit_code)
        lines = result.output.splitlines()
        self.assertEqual(','.join(COLUMNS), lines[0])
        self.assertEqual(4, len(lines))


class VerifyTest(CliTestCase):
    _ARGS = ('verify', '--pair', '4,1', '--n', '3', '--n', '6', '--samples', '2', '--seed', '3')

    def test_jsonl(self) -> None:
        result = _invoke(self._ARGS)
        self.assertEqual(0, result.exit_code)
        rows = [json.loads(line) for line in result.output.splitlines()]
        self.assertEqual(4, len(rows))
        self.assertEqual([3, 3, 6, 6], [row['n'] for row in rows])
        for row in rows:
            self.assertTrue(row['ok'])
            self.assertEqual(4.0, row['a'])

    def test_deterministic(self) -> None:
        self.assertEqual(_invoke(self._ARGS).output, _invoke(self._ARGS).output)

    def test_seed_from_the_environment(self) -> None:
        args = ('verify', '--pair', '4,1', '--n', '3', '--samples', '2')
        from_option = _invoke(args + ('--seed', '5')).output
        from_environment = _invoke(args + ('--seed', '1'), env={'AVK_SEED': '5'}).output
        self.assertEqual(from_option, from_environment)
        self.assertNotEqual(from_option, _invoke(args + ('--seed', '1')).output)

    def test_invalid_environment_seed(self) -> None:
        result = _invoke(self._ARGS, env={'AVK_SEED': 'seven'})
        self.assertEqual(2, result.exit_code)

    @parameterized.expand([
        ('1,1',),
        ('4',),
        ('four,one',),
    ])
    def test_invalid_pair(self, pair: str) -> None:
        result = _invoke(('verify', '--pair', pair))
        self.assertEqual(2, result.exit_code)

    def test_inconsistent_suite_and_backend(self) -> None:
        result = _invoke(('verify', '--pair', '5,1', '--suite', 'matrix', '--backend', 'tree'))
        self.assertEqual(2, result.exit_code)

    @parameterized.expand([
        ('ap', 'h3'),
        ('cat', 'tree'),
        ('matrix', 'h2'),
        ('lemmas', 'h2'),
    ])
    def test_suites(self, suite: str, backend: str) -> None:
        result = _invoke(('verify', '--pair', '5,1', '--n', '4', '--samples', '2', '--suite', suite, '--backend', backend))
        self.assertEqual(0, result.exit_code)
        self.assertEqual([suite, suite], [json.loads(line)['suite'] for line in result.output.splitlines()])

    def test_out(self) -> None:
        result = _invoke(self._ARGS + ('--format', 'csv', '--out', 'results/sweep.csv'))
        self.assertEqual(0, result.exit_code)
        self.assertEqual('', result.output)
        with open(Path('results') / 'sweep.csv') as f:
            lines = f.read().splitlines()
        self.assertEqual(','.join(COLUMNS), lines[0])
        self.assertEqual(5, len(lines))


class GenerateTest(CliTestCase):
    @parameterized.expand([
        ('h2',),
        ('h3',),
        ('tree',),
    ])
    def test_generate_and_verify(self, backend: str) -> None:
        generated = _invoke(('generate', '--pair', '4,1', '--n', '6', '--seed', '2', '--backend', backend))
        self.assertEqual(0, generated.exit_code)
        with open('chain.json', 'w') as f:
            f.write(generated.output)
        for suite in ('ap', 'cat'):
            result = _invoke(('verify', '--from-file', 'chain.json', '--suite', suite))
            self.assertEqual(0, result.exit_code)
            rows = [json.loads(line) for line in result.output.splitlines()]
            self.assertEqual(1, len(rows))
            self.assertTrue(rows[0]['ok'])
            self.assertEqual(6, rows[0]['n'])

    def test_deterministic(self) -> None:
        args = ('generate', '--pair', '4,1', '--n', '6', '--seed', '2')
        self.assertEqual(_invoke(args).output, _invoke(args).output)

    def test_pair(self) -> None:
        document = json.loads(_invoke(('generate', '--pair', '3,0.5', '--n', '2')).output)
        self.assertEqual(3.0, document['pair']['a'])
        self.assertEqual(0.5, document['pair']['b'])
        self.assertEqual('H2', document['model'])
        self.assertEqual(3, len(document['points']))

    def test_matrices(self) -> None:
        generated = _invoke(('generate', '--pair', '5,1', '--n', '8', '--seed', '4', '--matrices'))
        self.assertEqual(0, generated.exit_code)
        document = json.loads(generated.output)
        self.assertEqual('schema.json#/definitions/matChain', document['$schema'])
        self.assertEqual(8, len(document['mats']))
        self.assertEqual([4] * 8, [len(matrix) for matrix in document['mats']])
        with open('mats.json', 'w') as f:
            f.write(generated.output)
        result = _invoke(('verify', '--from-file', 'mats.json', '--suite', 'matrix'))
        self.assertEqual(0, result.exit_code)
        row = json.loads(result.output.splitlines()[0])
        self.assertEqual('matrix', row['suite'])
        self.assertEqual(8, row['n'])
        self.assertTrue(row['ok'])

    @parameterized.expand([
        ('h3',),
        ('tree',),
    ])
    def test_matrices_need_h2(self, backend: str) -> None:
        result = _invoke(('generate', '--pair', '5,1', '--n', '4', '--backend', backend, '--matrices'))
        self.assertEqual(2, result.exit_code)


class VerifyFromFileTest(CliTestCase):
    def test_violation(self) -> None:
        _write_json('chain.json', {
            'model': 'H2',
            'pair': {'a': 4.0, 'b': 1.0},
            'points': [[0.0, 1.0], [0.0, 2.0], [1.0, 2.0]],
        })
        result = _invoke(('verify', '--from-file', 'chain.json'))
        self.assertEqual(1, result.exit_code)
        self.assertFalse(json.loads(result.output.splitlines()[0])['ok'])

    def test_invalid_json(self) -> None:
        with open('chain.json', 'w') as f:
            f.write('{"model": ')
        result = _invoke(('verify', '--from-file', 'chain.json'))
        self.assertEqual(2, result.exit_code)

    def test_invalid_document(self) -> None:
        _write_json('chain.json', {'model': 'H2', 'points': [[0.0, -1.0], [0.0, 2.0]]})
        result = _invoke(('verify', '--from-file', 'chain.json', '--suite', 'cat'))
        self.assertEqual(2, result.exit_code)

    def test_ap_without_pair(self) -> None:
        _write_json('chain.json', {'model': 'H2', 'points': [[0.0, 1.0], [0.0, 2.0]]})
        result = _invoke(('verify', '--from-file', 'chain.json', '--suite', 'ap'))
        self.assertEqual(2, result.exit_code)

    def test_chain_with_the_matrix_suite(self) -> None:
        _write_json('chain.json', json.loads(_invoke(('generate', '--pair', '5,1', '--n', '5', '--seed', '1')).output))
        result = _invoke(('verify', '--from-file', 'chain.json', '--suite', 'matrix'))
        self.assertEqual(0, result.exit_code)
        self.assertTrue(json.loads(result.output.splitlines()[0])['ok'])

    def test_matrices_with_the_ap_suite(self) -> None:
        _write_json('mats.json', {'mats': [[2.0, 0.0, 0.0, 0.5]], 'pair': {'a': 5.0, 'b': 1.0}})
        result = _invoke(('verify', '--from-file', 'mats.json', '--suite', 'ap'))
        self.assertEqual(2, result.exit_code)

    def test_matrices_violation(self) -> None:
        _write_json('mats.json', {
            'mats': [[0.05, 0.0, 0.0, 20.0], [20.0, 0.0, 0.0, 0.05], [20.0, 0.0, 0.0, 0.05]],
            'pair': {'a': 5.0, 'b': 1.0},
        })
        result = _invoke(('verify', '--from-file', 'mats.json', '--suite', 'matrix'))
        self.assertEqual(1, result.exit_code)
        self.assertFalse(json.loads(result.output.splitlines()[0])['ok'])

    def test_matrices_with_a_small_pair(self) -> None:
        _write_json('mats.json', {'mats': [[2.0, 0.0, 0.0, 0.5]], 'pair': {'a': 3.0, 'b': 1.0}})
        result = _invoke(('verify', '--from-file', 'mats.json', '--suite', 'matrix'))
        self.assertEqual(2, result.exit_code)


class TableTest(CliTestCase):
    @parameterized.expand([
        ('polygon', 'n,r,tension,tension_per_vertex,formula', 46),
        ('canonical', 'j,re,im,step,gromov,a,b', 10),
        ('degenerate', 'n,translation,tension,bound', 17),
    ])
    def test_table(self, example: str, header: str, line_count: int) -> None:
        result = _invoke(('table', example))
        self.assertEqual(0, result.exit_code)
        lines = result.output.splitlines()
        self.assertEqual(header, lines[0])
        self.assertEqual(line_count, len(lines))

    def test_unknown_table(self) -> None:
        result = CliRunner().invoke(main, ('table', 'hexagon'))
        self.assertEqual(2, result.exit_code)


class CatchExceptionsTest(unittest.TestCase):
    def test_logging_user_facing_error(self) -> None:
        error_message = 'Something went wrong!'
        with self.assertLogs() as watcher:
            with self.assertRaises(SystemExit) as raised:
                with catch_exceptions():
                    raise UserFacingError(error_message)
            self.assertEqual('ERROR:root:%s' % error_message, watcher.output[0])
        self.assertEqual(1, raised.exception.code)

    def test_configuration_error(self) -> None:
        with self.assertLogs():
            with self.assertRaises(SystemExit) as raised:
                with catch_exceptions():
                    raise ConfigurationError('The pair is not good.')
        self.assertEqual(2, raised.exception.code)

    def test_logging_uncaught_exception(self) -> None:
        error_message = 'Something went wrong!'
        with self.assertLogs() as watcher:
            with self.assertRaises(SystemExit) as raised:
                with catch_exceptions():
                    raise Exception(error_message)
            self.assertTrue(watcher.output[0].startswith('ERROR:root:%s' % error_message))
        self.assertEqual(1, raised.exception.code)

    def test_keyboard_interrupt(self) -> None:
        with self.assertRaises(SystemExit) as raised:
            with catch_exceptions():
                raise KeyboardInterrupt
        self.assertEqual(0, raised.exception.code)
