# tests/test_cli.py

import io
import json
import math
import os
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from unittest.mock import patch

import numpy as np

from phase_squeezing.cli.config import parse_config, parse_grid, parse_number
from phase_squeezing.cli.main import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, main, run
from phase_squeezing.errors import ConfigError, ParseError, ValidationError
from phase_squeezing.experiments.presets import FIG2_PARAMS, FIG3_PARAMS, PRESETS
from phase_squeezing.utils.logging import RunLogger

VARIANCE_CONFIG = """
# resonant driving, squeezing phase
mode=variance
gamma1=20
omega1=8
omega2=8
omega3=3
phi=-pi/2
output={output}
"""


def read_csv(path):
    with open(path, encoding='utf-8') as handle:
        lines = handle.read().split('\n')
    return lines[0].split(','), [line.split(',') for line in lines[1:] if line]


def read_log(path):
    with open(path, encoding='utf-8') as handle:
        return [json.loads(line) for line in handle if line.strip()]


class TestParseNumber(unittest.TestCase):
    def test_plain_and_pi_multiples(self):
        self.assertEqual(parse_number('2.5'), 2.5)
        self.assertEqual(parse_number(' -3 '), -3.0)
        self.assertEqual(parse_number('pi'), math.pi)
        self.assertAlmostEqual(parse_number('-pi/2'), -math.pi / 2)
        self.assertAlmostEqual(parse_number('3*pi/4'), 3 * math.pi / 4)
        self.assertAlmostEqual(parse_number('0.5*pi'), math.pi / 2)

    def test_rejected(self):
        for text in ('abc', 'pi/0', 'inf', 'nan', '2pi', ''):
            with self.assertRaises(ValueError, msg=text):
                parse_number(text)

    def test_grid(self):
        self.assertEqual(parse_grid('-120, 120, 2001'), (-120.0, 120.0, 2001))
        low, high, points = parse_grid('-pi/2,pi,5')
        self.assertAlmostEqual(low, -math.pi / 2)
        self.assertEqual(points, 5)
        with self.assertRaises(ValueError):
            parse_grid('0,1')
        with self.assertRaises(ValueError):
            parse_grid('0,1,2.5')


class TestParseConfig(unittest.TestCase):
    def test_variance_config(self):
        config = parse_config(VARIANCE_CONFIG.format(output='out.csv'))
        self.assertEqual(config.mode, 'variance')
        self.assertEqual(config.output, 'out.csv')
        self.assertAlmostEqual(config.params.phi, -math.pi / 2)
        self.assertEqual(config.params.omega3, 3.0)
        self.assertEqual(config.workers, 1)
        self.assertEqual(config.theta, 0.0)

    def test_sweep_config(self):
        config = parse_config(
            "mode=omega3-sweep\ngamma1=40\ngamma2=2\nomega1=16\nomega2=16\n"
            "phi=-pi/2\ngrid=0,10,11\nworkers=3\noutput=sweep.csv\n"
        )
        self.assertEqual(config.grid, (0.0, 10.0, 11))
        self.assertEqual(config.workers, 3)
        self.assertEqual(config.params.gamma1, 20.0)
        self.assertEqual(config.params.omega1, 8.0)

    def test_preset_config(self):
        config = parse_config("mode=preset\npreset=fig5\noutput=f.csv")
        self.assertEqual(config.preset, 'fig5')
        self.assertIsNone(config.params)

    def test_syntax_errors_carry_line(self):
        with self.assertRaises(ParseError) as ctx:
            parse_config("mode=variance\ngamma1 20\n")
        self.assertEqual(ctx.exception.line, 2)
        with self.assertRaises(ParseError) as ctx:
            parse_config("mode=variance\ngamma1=1\ngamma1=2\n")
        self.assertEqual(ctx.exception.line, 3)
        with self.assertRaises(ParseError) as ctx:
            parse_config("mode=variance\n\n# comment\nphi=half\n")
        self.assertEqual(ctx.exception.line, 4)
        with self.assertRaises(ParseError) as ctx:
            parse_config("mode=spectrum\ngamma1=abc")
        self.assertEqual(ctx.exception.line, 2)
        with self.assertRaises(ParseError):
            parse_config("mode=phi-sweep\ngrid=0,1\n")

    def test_semantic_errors_carry_key(self):
        cases = {
            "mode=variance\ngamma1=1\nspeed=3\noutput=a.csv": 'speed',
            "gamma1=1\noutput=a.csv": 'mode',
            "mode=fit\ngamma1=1\noutput=a.csv": 'mode',
            "mode=variance\ngamma1=1": 'output',
            "mode=variance\noutput=a.csv": 'gamma1',
            "mode=variance\ngamma1=1\nomega2=-1\noutput=a.csv": 'omega2',
            "mode=variance\ngamma1=1\ndelta1=2\ndelta2=1\ndelta3=3\noutput=a.csv": 'delta3',
            "mode=omega3-sweep\ngamma1=1\noutput=a.csv": 'grid',
            "mode=omega3-sweep\ngamma1=1\ngrid=-1,2,5\noutput=a.csv": 'grid',
            "mode=phi-sweep\ngamma1=1\ngrid=-4,0,5\noutput=a.csv": 'grid',
            "mode=spectrum\ngamma1=1\ngrid=2,1,5\noutput=a.csv": 'grid',
            "mode=spectrum\ngamma1=1\npreset=fig2a\noutput=a.csv": 'preset',
            "mode=preset\npreset=fig9\noutput=a.csv": 'preset',
            "mode=variance\ngamma1=1\nworkers=0\noutput=a.csv": 'workers'
        }
        for text, key in cases.items():
            with self.assertRaises(ValidationError, msg=text) as ctx:
                parse_config(text)
            self.assertEqual(ctx.exception.key, key, msg=text)
            self.assertIsInstance(ctx.exception, ConfigError)


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.log_path = os.path.join(self.tmp.name, 'runs.log')

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def write_config(self, text, name='run.cfg'):
        path = self.path(name)
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(text)
        return path

    def main(self, *argv):
        with redirect_stderr(io.StringIO()), redirect_stdout(io.StringIO()):
            return main(list(argv) + ['--log', self.log_path])


class TestRun(CliTestCase):
    def test_variance_run(self):
        output = self.path('variance.csv')
        run_logger = RunLogger(self.log_path)
        try:
            code = run(parse_config(VARIANCE_CONFIG.format(output=output)), run_logger)
        finally:
            run_logger.close()
        self.assertEqual(code, EXIT_OK)

        header, rows = read_csv(output)
        self.assertEqual(header, ['F', 'F_analytic', 'theta_opt', 'rho11', 'rho13_abs', 'phi31'])
        self.assertEqual(len(rows), 1)
        f_numeric, f_analytic = float(rows[0][0]), float(rows[0][1])
        self.assertLess(f_numeric, 0.0)
        self.assertAlmostEqual(f_numeric, f_analytic, delta=1e-8)

        records = read_log(self.log_path)
        self.assertEqual(len(records), 1)
        record = records[0]
        self.assertEqual(record['mode'], 'variance')
        self.assertTrue(record['checks_passed'])
        self.assertEqual(record['output'], output)
        self.assertEqual(record['params']['gamma1'], 20.0)
        self.assertEqual(len(record['run_id']), 12)
        self.assertEqual(
            {check['name'] for check in record['checks']}, {'steady_state_residual', 'physical_state'}
        )

    def test_numerical_failure(self):
        config = self.write_config(f"mode=variance\ngamma1=1\noutput={self.path('x.csv')}\n")
        self.assertEqual(self.main('--config', config), EXIT_NUMERICAL)
        self.assertFalse(os.path.exists(self.path('x.csv')))
        record = read_log(self.log_path)[0]
        self.assertEqual(record['event'], 'error')
        self.assertEqual(record['operation'], 'steady_state')
        self.assertFalse(record['checks_passed'])

    def test_unwritable_output(self):
        output = os.path.join(self.tmp.name, 'missing', 'out.csv')
        config = self.write_config(VARIANCE_CONFIG.format(output=output))
        self.assertEqual(self.main('--config', config), EXIT_CONFIG)

    def test_dressed_run_writes_two_tables(self):
        output = self.path('dressed.csv')
        config = self.write_config(
            f"mode=dressed\ngamma1=0.1\ndelta1=15\ndelta2=-15\nomega1=30\nomega2=30\n"
            f"omega3=10\nphi=0\noutput={output}\n"
        )
        self.assertEqual(self.main('--config', config), EXIT_OK)
        header, rows = read_csv(output)
        self.assertEqual(header[0], 'state')
        self.assertEqual([row[0] for row in rows], ['alpha', 'beta', 'kappa'])
        self.assertAlmostEqual(float(rows[0][1]), 26.07, delta=0.01)
        self.assertAlmostEqual(sum(float(row[-1]) for row in rows), 1.0, delta=1e-12)

        header, rows = read_csv(self.path('dressed_pairs.csv'))
        self.assertEqual(header, ['pair', 'omega_ij', 'gamma_ij', 'width_numeric'])
        self.assertEqual([row[0] for row in rows], ['alpha-beta', 'alpha-kappa', 'beta-kappa'])

    def test_spectrum_runs(self):
        for mode in ('spectrum', 'spectrum-oracle'):
            output = self.path(f'{mode}.csv')
            config = self.write_config(
                f"mode={mode}\ngamma1=20\nomega1=8\nomega2=8\nomega3=3\nphi=-pi/2\n"
                f"theta=pi/4\ngrid=-30,30,13\noutput={output}\n",
                name=f'{mode}.cfg'
            )
            self.assertEqual(self.main('--config', config), EXIT_OK)
            header, rows = read_csv(output)
            self.assertEqual(header, ['omega', 'S'])
            self.assertEqual(len(rows), 13)
            self.assertEqual(float(rows[0][0]), -30.0)
        exact = np.loadtxt(self.path('spectrum.csv'), delimiter=',', skiprows=1)
        oracle = np.loadtxt(self.path('spectrum-oracle.csv'), delimiter=',', skiprows=1)
        scale = np.max(np.abs(exact[:, 1]))
        np.testing.assert_allclose(oracle[:, 1], exact[:, 1], atol=1e-3 * scale)


class TestPresets(CliTestCase):
    def test_fig4(self):
        output = self.path('fig4.csv')
        self.assertEqual(self.main('--preset', 'fig4', '--output', output), EXIT_OK)
        header, rows = read_csv(output)
        self.assertEqual(header, ['omega3', 'rho11', 'rho22', 'abs_rho12', 'abs_rho13'])
        self.assertEqual(len(rows), 201)
        self.assertEqual(float(rows[-1][0]), 10.0)

    def test_fig3(self):
        output = self.path('fig3.csv')
        self.assertEqual(self.main('--preset', 'fig3', '--output', output, '--workers', '2'), EXIT_OK)
        table = np.loadtxt(output, delimiter=',', skiprows=1)
        self.assertEqual(table.shape, (402, 3))
        squeezing_phase = table[np.isclose(table[:, 0], -math.pi / 2)]
        self.assertEqual(len(squeezing_phase), 201)
        self.assertLess(np.min(squeezing_phase[:, 2]), -0.08)
        record = read_log(self.log_path)[0]
        self.assertEqual(record['params']['preset'], 'fig3')
        self.assertEqual(len(record['checks']), 4)

    def test_fig5_is_deterministic(self):
        first, second = self.path('a.csv'), self.path('b.csv')
        self.assertEqual(self.main('--preset', 'fig5', '--output', first), EXIT_OK)
        self.assertEqual(self.main('--preset', 'fig5', '--output', second, '--workers', '3'), EXIT_OK)
        with open(first, 'rb') as a, open(second, 'rb') as b:
            content = a.read()
            self.assertEqual(content, b.read())
        self.assertNotIn(b'\r', content)
        header, rows = read_csv(first)
        self.assertEqual(header, ['phi', 'F'])
        self.assertEqual(len(rows), 360)
        self.assertEqual(float(rows[-1][0]), math.pi)

    def test_fig2_spectra(self):
        windows = {'fig2a': (25.0, 40.0), 'fig2b': (50.0, 67.0)}
        for name, (low, high) in windows.items():
            output = self.path(f'{name}.csv')
            self.assertEqual(self.main('--preset', name, '--output', output, '--workers', '2'), EXIT_OK)
            header, rows = read_csv(output)
            self.assertEqual(header, ['omega', 'S_omega3_10', 'S_omega3_0'])
            self.assertEqual(len(rows), 2001)
            table = np.array(rows, dtype=float)
            self.assertEqual(table[0, 0], -120.0)
            self.assertEqual(table[-1, 0], 120.0)
            with self.subTest(preset=name):
                sideband = (table[:, 0] >= low) & (table[:, 0] <= high)
                self.assertLess(np.min(table[sideband, 1]), 0.0)

    def test_presets_carry_figure_values(self):
        self.assertEqual(FIG2_PARAMS, {
            'gamma1': 0.1, 'gamma2': 1.0, 'delta1': 15.0, 'delta2': -15.0,
            'omega1': 30.0, 'omega2': 30.0
        })
        self.assertEqual(FIG3_PARAMS, {
            'gamma1': 20.0, 'gamma2': 1.0, 'delta1': 0.0, 'delta2': 0.0,
            'omega1': 8.0, 'omega2': 8.0
        })
        spectrum_series = (('S_omega3_10', {'omega3': 10.0}), ('S_omega3_0', {'omega3': 0.0}))
        for name, phi in (('fig2a', 0.0), ('fig2b', math.pi)):
            preset = PRESETS[name]
            self.assertEqual(preset.kind, 'spectrum')
            self.assertEqual(preset.params, {**FIG2_PARAMS, 'phi': phi})
            self.assertEqual(preset.grid, (-120.0, 120.0, 2001))
            self.assertEqual(preset.series, spectrum_series)

        self.assertEqual(PRESETS['fig3'].params, FIG3_PARAMS)
        self.assertEqual(PRESETS['fig3'].grid, (0.0, 10.0, 201))
        self.assertEqual(
            [changes['phi'] for _, changes in PRESETS['fig3'].series], [-math.pi / 2, math.pi / 2]
        )
        self.assertEqual(PRESETS['fig4'].params, {**FIG3_PARAMS, 'phi': -math.pi / 2})
        self.assertEqual(PRESETS['fig4'].grid, (0.0, 10.0, 201))
        self.assertEqual(PRESETS['fig5'].params, {**FIG3_PARAMS, 'omega3': 3.0})
        low, high, points = PRESETS['fig5'].grid
        self.assertAlmostEqual(low, -math.pi + math.pi / 180)
        self.assertEqual((high, points), (math.pi, 360))

    def test_preset_needs_output(self):
        self.assertEqual(self.main('--preset', 'fig5'), EXIT_CONFIG)

    def test_unknown_preset(self):
        with redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit):
                main(['--preset', 'fig9', '--output', self.path('x.csv')])


class TestEntryPoint(CliTestCase):
    def test_no_arguments(self):
        self.assertEqual(self.main(), EXIT_CONFIG)

    def test_missing_config_file(self):
        self.assertEqual(self.main('--config', self.path('absent.cfg')), EXIT_CONFIG)

    def test_invalid_config_file(self):
        config = self.write_config("mode=variance\ngamma1=1\nunknown=2\noutput=a.csv\n")
        self.assertEqual(self.main('--config', config), EXIT_CONFIG)

    @patch('phase_squeezing.cli.main.InvariantChecker')
    def test_check_exit_codes(self, checker):
        checker.return_value.run_all.return_value = [
            {'name': 'dark_state', 'passed': True, 'reason': ''}
        ]
        self.assertEqual(self.main('--check'), EXIT_OK)
        checker.return_value.run_all.return_value.append(
            {'name': 'sum_rule', 'passed': False, 'reason': 'off by 5%'}
        )
        self.assertEqual(self.main('--check'), EXIT_NUMERICAL)


if __name__ == '__main__':
    unittest.main()
