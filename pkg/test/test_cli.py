import io
import json
import logging
import os
import tempfile
import unittest
from contextlib import redirect_stdout
from pathlib import Path
from unittest import mock

from nonlocal_wave_toolbox import __version__
from nonlocal_wave_toolbox.experiments.cli import main
from nonlocal_wave_toolbox.experiments.config import config_from_dict, echo, parse_config
from nonlocal_wave_toolbox.experiments.presets import PRESETS
from nonlocal_wave_toolbox.settings import get_settings

SHORT = ['--override', 'evolution.t_end=0.01']


def run_cli(*argv) -> tuple[int, str]:
    out = io.StringIO()
    with redirect_stdout(out):
        code = main(list(argv))
    return code, out.getvalue()


class TestSettings(unittest.TestCase):
    def test_defaults(self):
        with mock.patch.dict(os.environ, {}, clear=True):
            settings = get_settings()
        self.assertEqual(settings.output_dir, Path('runs'))
        self.assertEqual(settings.log_level, 'INFO')
        self.assertEqual(settings.workers, 1)

    def test_environment(self):
        env = {'NONLOCAL_WAVES_OUTPUT_DIR': '/tmp/waves', 'NONLOCAL_WAVES_LOG_LEVEL': 'debug',
               'NONLOCAL_WAVES_WORKERS': '4'}
        with mock.patch.dict(os.environ, env):
            settings = get_settings()
        self.assertEqual(settings.output_dir, Path('/tmp/waves'))
        self.assertEqual(settings.log_level, 'DEBUG')
        self.assertEqual(settings.workers, 4)


class TestCommands(unittest.TestCase):
    def test_presets(self):
        code, out = run_cli('presets')
        self.assertEqual(code, 0)
        self.assertEqual([line.split()[0] for line in out.splitlines()], list(PRESETS))

    def test_describe(self):
        code, out = run_cli('describe', 'global-singular-kernel', '--override', 'evolution.dt=1e-3')
        self.assertEqual(code, 0)
        cfg = parse_config(out)
        self.assertEqual(cfg.name, 'global-singular-kernel')
        self.assertEqual(cfg.evolution.dt, 1e-3)

    def test_describe_unknown_preset(self):
        self.assertEqual(run_cli('describe', 'heat-equation')[0], 1)

    def test_unknown_source(self):
        self.assertEqual(run_cli('--quiet', 'run', 'no-such-experiment')[0], 1)

    def test_invalid_override(self):
        self.assertEqual(run_cli('--quiet', 'run', 'linear-dispersion', '--override', 'evolution.dt=-1')[0], 1)

    def test_log_levels(self):
        for flag, level in (('--quiet', logging.WARNING), ('--verbose', logging.DEBUG)):
            with mock.patch('logging.basicConfig') as basic_config, redirect_stdout(io.StringIO()):
                self.assertEqual(main([flag, 'presets']), 0)
            self.assertEqual(basic_config.call_args.kwargs['level'], level)

    def test_version(self):
        out = io.StringIO()
        with redirect_stdout(out), self.assertRaises(SystemExit):
            main(['--version'])
        self.assertIn(__version__, out.getvalue())


class TestRun(unittest.TestCase):
    def test_run_preset(self):
        with tempfile.TemporaryDirectory() as directory:
            code, out = run_cli('run', 'linear-dispersion', '--output-dir', directory,
                                '--override', 'evolution.t_end=0.1', '--override', 'output.metrics=true')
            self.assertEqual(code, 0)
            self.assertTrue(out.startswith('linear-dispersion: completed'))
            names = sorted(os.listdir(directory))
            self.assertEqual(names, ['linear-dispersion.csv', 'linear-dispersion.json', 'linear-dispersion.prom'])
            with open(os.path.join(directory, 'linear-dispersion.json'), encoding='utf-8') as f:
                report = json.load(f)
            with open(os.path.join(directory, 'linear-dispersion.csv'), encoding='utf-8') as f:
                header = f.readline().strip()
        self.assertEqual(report['outcome'], 'completed')
        self.assertEqual(report['exit_code'], 0)
        self.assertEqual(report['version'], __version__)
        self.assertIsNone(report['certificate'])
        self.assertLess(report['oracle_max_error'], 1e-8)
        self.assertEqual(report['config']['evolution']['t_end'], 0.1)
        self.assertEqual(header, 't,E_total,kinetic1,kinetic2,potential,sup_u1,sup_u2,hs_norm,oracle_error')

    def test_csv_is_deterministic(self):
        contents = []
        with tempfile.TemporaryDirectory() as directory:
            for attempt in ('a', 'b'):
                target = os.path.join(directory, attempt)
                self.assertEqual(run_cli('--quiet', 'run', 'energy-conservation', '--output-dir', target, *SHORT)[0], 0)
                with open(os.path.join(target, 'energy-conservation.csv'), encoding='utf-8') as f:
                    contents.append(f.read())
        self.assertEqual(contents[0], contents[1])
        self.assertEqual(len(contents[0].splitlines()), 3)

    def test_run_config_file(self):
        data = {'grid': {'n': 32, 'period': 20.0},
                'kernel1': {'family': 'higher_order', 'params': {'a': 1.0, 'b': 0.5}},
                'nonlinearity': {'family': 'isotropic_power', 'params': {'kappa': 1.0, 'p': 2.0}},
                'initial': {'phi1': {'shape': 'cosine', 'amplitude': 0.3, 'mode': 2}},
                'evolution': {'dt': 0.01, 't_end': 0.5, 'stride': 10},
                'output': {'json': False}}
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'from_file.yaml')
            with open(path, 'w', encoding='utf-8') as f:
                f.write(echo(config_from_dict(data, default_name='from_file')))
            target = os.path.join(directory, 'out')
            self.assertEqual(run_cli('--quiet', 'run', path, '--output-dir', target)[0], 0)
            self.assertEqual(os.listdir(target), ['from_file.csv'])

    def test_unwritable_output(self):
        with tempfile.NamedTemporaryFile() as blocker:
            target = os.path.join(blocker.name, 'runs')
            self.assertEqual(run_cli('--quiet', 'run', 'linear-dispersion', '--output-dir', target, *SHORT)[0], 4)


class TestSweep(unittest.TestCase):
    def test_duplicate_names_get_separate_directories(self):
        with tempfile.TemporaryDirectory() as directory:
            code, out = run_cli('sweep', 'linear-dispersion', 'linear-dispersion', 'energy-conservation',
                                '--output-dir', directory, '--workers', '2', *SHORT)
            self.assertEqual(code, 0)
            self.assertEqual(sorted(os.listdir(directory)),
                             ['energy-conservation', 'linear-dispersion', 'linear-dispersion-1'])
            for name in ('linear-dispersion', 'linear-dispersion-1'):
                self.assertTrue(os.path.isfile(os.path.join(directory, name, 'linear-dispersion.csv')))
        self.assertEqual(len(out.splitlines()), 3)

    def test_worst_exit_code_wins(self):
        with tempfile.TemporaryDirectory() as directory:
            code, _ = run_cli('--quiet', 'sweep', 'linear-dispersion', 'blowup-negative-energy',
                              '--output-dir', directory, '--override', 'output.csv=false')
        self.assertEqual(code, 2)


if __name__ == '__main__':
    unittest.main()
