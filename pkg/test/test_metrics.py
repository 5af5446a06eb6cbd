import os
import tempfile
import unittest

import numpy as np
from prometheus_client import CollectorRegistry

from nonlocal_wave_toolbox.grid import Grid
from nonlocal_wave_toolbox.kernels import exponential_kernel
from nonlocal_wave_toolbox.metrics import SimulationMetrics, handle_exceptions
from nonlocal_wave_toolbox.nonlinearity import quartic_family
from nonlocal_wave_toolbox.solver import EvolutionConfig, InitialData, Outcome, integrate

TWO_PI = Grid(16, 2 * np.pi)
EXP = exponential_kernel()


class TestHandleExceptions(unittest.TestCase):
    def test_listed_exception_becomes_nan(self):
        @handle_exceptions(ZeroDivisionError)
        def divide(a, b):
            return a / b

        self.assertEqual(divide(1, 2), 0.5)
        self.assertTrue(np.isnan(divide(1, 0)))

    def test_other_exceptions_propagate(self):
        @handle_exceptions(ZeroDivisionError)
        def fail():
            raise KeyError('x')

        with self.assertRaises(KeyError):
            fail()


class TestSimulationMetrics(unittest.TestCase):
    def setUp(self):
        self.registry = CollectorRegistry()
        self.nl = quartic_family(1, 0)
        self.metrics = SimulationMetrics(EXP, EXP, self.nl, registry=self.registry)

    def sample(self, name, labels=None):
        return self.registry.get_sample_value(f'nonlocal_waves_simulation_{name}', labels or {})

    def test_initial_state(self):
        self.assertEqual(self.sample('outcome', {'nonlocal_waves_simulation_outcome': 'running'}), 1.0)
        self.assertEqual(self.sample('snapshots_total'), 0.0)

    def test_observer(self):
        init = InitialData(TWO_PI.sample(lambda x: 0.5 * np.cos(x)), TWO_PI.zeros(),
                           TWO_PI.sample(lambda x: 0.2 * np.sin(x)), TWO_PI.zeros())
        result = integrate(init, EvolutionConfig(dt=0.01, t_end=1.0, stride=25), EXP, EXP, self.nl, [self.metrics])
        self.metrics.set_outcome(result.outcome)

        self.assertEqual(self.sample('snapshots_total'), len(result.snapshots))
        self.assertAlmostEqual(self.sample('time'), 1.0)
        self.assertAlmostEqual(self.sample('sup_norm', {'component': 'u1'}), result.snapshots[-1].sup_u1)
        self.assertEqual(self.sample('sup_norm', {'component': 'u2'}), 0.0)
        self.assertLess(self.sample('energy_relative_drift'), 1e-8)
        self.assertGreater(self.sample('energy_total'), 0.0)
        self.assertEqual(self.sample('outcome', {'nonlocal_waves_simulation_outcome': 'completed'}), 1.0)
        self.assertEqual(self.sample('outcome', {'nonlocal_waves_simulation_outcome': 'running'}), 0.0)

    def test_undefined_energy_is_nan(self):
        init = InitialData(TWO_PI.zeros(), TWO_PI.zeros(), TWO_PI.field(np.full(16, 0.1)), TWO_PI.zeros())
        integrate(init, EvolutionConfig(dt=0.1, t_end=0.0), EXP, EXP, self.nl, [self.metrics])
        self.assertTrue(np.isnan(self.sample('energy_total')))

    def test_write(self):
        self.metrics.set_outcome(Outcome.BLOWUP_DETECTED)
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'run.prom')
            self.metrics.write(path)
            with open(path, encoding='utf-8') as f:
                text = f.read()
        self.assertIn('nonlocal_waves_simulation_outcome{nonlocal_waves_simulation_outcome="blowup_detected"} 1.0',
                      text)


if __name__ == '__main__':
    unittest.main()
