import unittest

import numpy as np
from numpy.testing import assert_allclose

from nonlocal_wave_toolbox.diagnostics import (BlowupCertificate, CertificateStatus, PhiSeries, build_certificate,
                                               coercivity_margin, energy, kinetic_a_priori_bound, levine_bound,
                                               local_energy_density, phi_at, phi_series,
                                               verify_concavity_along_trajectory, verify_concavity_inequality)
from nonlocal_wave_toolbox.exceptions import ZeroModeError
from nonlocal_wave_toolbox.grid import Grid
from nonlocal_wave_toolbox.kernels import exponential_kernel, higher_order_kernel
from nonlocal_wave_toolbox.nonlinearity import quartic_family
from nonlocal_wave_toolbox.solver import EvolutionConfig, InitialData, State, integrate

TWO_PI = Grid(16, 2 * np.pi)
EXP = exponential_kernel()
FOCUSING = quartic_family(-1, 0)


def cosine_data(phi1=0.0, phi2=0.0, psi1=0.0, psi2=0.0) -> InitialData:
    return InitialData(*(TWO_PI.sample(lambda x, a=a: a * np.cos(x)) for a in (phi1, phi2, psi1, psi2)))


def certificate(b: float, t0: float) -> BlowupCertificate:
    return BlowupCertificate(nu=0.5, b=b, t0=t0, A=0.0, B=0.0, E0=-b, phi0=b * t0 ** 2, dphi0=2 * b * t0,
                             levine_bound=1.0, status=CertificateStatus.NEGATIVE_ENERGY)


class TestEnergy(unittest.TestCase):
    def test_potential_only(self):
        e = energy(cosine_data(phi1=1.0).to_state(), EXP, EXP, quartic_family(0, 0))
        self.assertAlmostEqual(e.potential, np.pi, places=12)
        self.assertEqual(e.kinetic1, 0.0)
        self.assertAlmostEqual(e.total, np.pi, places=12)

    def test_kinetic_only(self):
        e = energy(cosine_data(psi2=1.0).to_state(), EXP, EXP, quartic_family(1, 1))
        self.assertAlmostEqual(e.kinetic2, 2 * np.pi, places=12)
        self.assertEqual(set(e.as_dict()), {'kinetic1', 'kinetic2', 'potential', 'total'})

    def test_quartic_potential(self):
        # 2 int (2 cos^2 - 4 cos^4) = 4 pi - 6 pi
        e = energy(cosine_data(phi1=2.0).to_state(), EXP, EXP, FOCUSING)
        self.assertAlmostEqual(e.potential, -2 * np.pi, places=11)

    def test_mean_velocity(self):
        init = InitialData(TWO_PI.zeros(), TWO_PI.zeros(), TWO_PI.field(np.full(16, 0.1)), TWO_PI.zeros())
        with self.assertRaises(ZeroModeError):
            energy(init.to_state(), EXP, EXP, FOCUSING)

    def test_conserved_along_rk4(self):
        init = InitialData(TWO_PI.sample(lambda x: 0.5 * np.cos(x)), TWO_PI.sample(lambda x: 0.3 * np.sin(2 * x)),
                           TWO_PI.sample(lambda x: 0.2 * np.sin(x)), TWO_PI.zeros())
        k2 = higher_order_kernel(1, 1)
        nl = quartic_family(1, 1)
        result = integrate(init, EvolutionConfig(dt=0.01, t_end=5.0, stride=50), EXP, k2, nl)
        totals = np.array([energy(s.state, EXP, k2, nl).total for s in result.snapshots])
        self.assertLess(np.max(np.abs(totals - totals[0])) / abs(totals[0]), 1e-8)


class TestCertificate(unittest.TestCase):
    def test_negative_energy(self):
        cert = build_certificate(cosine_data(phi1=2.0, psi1=0.5), 0.5, EXP, EXP, FOCUSING)
        self.assertEqual(cert.status, CertificateStatus.NEGATIVE_ENERGY)
        self.assertTrue(cert.certified)
        self.assertAlmostEqual(cert.E0, -1.5 * np.pi, places=11)
        self.assertAlmostEqual(cert.A, 2 * np.pi, places=11)
        self.assertAlmostEqual(cert.B, 8 * np.pi, places=11)
        self.assertAlmostEqual(cert.b, 1.5 * np.pi, places=11)
        self.assertEqual(cert.t0, 0.0)
        self.assertAlmostEqual(cert.levine_bound, 4.0, places=11)

    def test_margin_past_negative_A(self):
        cert = build_certificate(cosine_data(phi1=2.0, psi1=-0.5), 0.5, EXP, EXP, FOCUSING, margin=1.0)
        self.assertEqual(cert.status, CertificateStatus.NEGATIVE_ENERGY)
        # A = -2 pi, b = 1.5 pi
        self.assertAlmostEqual(cert.t0, 4.0 / 3.0 + 1.0, places=11)
        self.assertGreater(cert.dphi0, 0)

    def test_optimal_strategy_is_no_worse(self):
        init = cosine_data(phi1=2.0, psi1=0.5)
        margin = build_certificate(init, 0.5, EXP, EXP, FOCUSING)
        optimal = build_certificate(init, 0.5, EXP, EXP, FOCUSING, t0_strategy='optimal')
        self.assertAlmostEqual(optimal.t0, 4.0 / 3.0, places=11)
        self.assertAlmostEqual(optimal.levine_bound, 8.0 / 3.0, places=11)
        self.assertLessEqual(optimal.levine_bound, margin.levine_bound)

    def test_positive_energy(self):
        cert = build_certificate(cosine_data(phi1=2.0, psi1=0.5, psi2=2.0), 0.5, EXP, EXP, FOCUSING)
        A, B, E0 = 2 * np.pi, 8 * np.pi, 6.5 * np.pi
        t0 = -np.sqrt(0.5 * (A ** 2 / E0 ** 2 + B / E0))
        self.assertEqual(cert.status, CertificateStatus.POSITIVE_ENERGY)
        self.assertAlmostEqual(cert.E0, E0, places=10)
        self.assertAlmostEqual(cert.b, -E0, places=10)
        self.assertAlmostEqual(cert.t0, t0, places=10)
        self.assertAlmostEqual(cert.levine_bound, (B - E0 * t0 ** 2) / (0.5 * (2 * A - 2 * E0 * t0)), places=10)

    def test_not_certified(self):
        cert = build_certificate(cosine_data(phi1=2.0, psi1=2.0), 0.5, EXP, EXP, FOCUSING)
        self.assertEqual(cert.status, CertificateStatus.NOT_CERTIFIED)
        self.assertFalse(cert.certified)
        self.assertTrue(np.isnan(cert.levine_bound))
        self.assertEqual(cert.as_dict()['status'], 'not_certified')

    def test_arguments(self):
        init = cosine_data(phi1=2.0)
        with self.assertRaises(ValueError):
            build_certificate(init, 0.0, EXP, EXP, FOCUSING)
        with self.assertRaises(ValueError):
            build_certificate(init, 0.5, EXP, EXP, FOCUSING, t0_strategy='best')
        with self.assertRaises(ValueError):
            levine_bound(1.0, -1.0, 0.5)


class TestPhi(unittest.TestCase):
    def test_zero_trajectory(self):
        init = cosine_data()
        result = integrate(init, EvolutionConfig(dt=0.5, t_end=2.0, stride=1), EXP, EXP, FOCUSING)
        series = phi_series(result, certificate(b=1.0, t0=1.0), EXP, EXP, FOCUSING)
        assert_allclose(series.phi, (result.times + 1) ** 2)
        assert_allclose(series.dphi, 2 * (result.times + 1))
        assert_allclose(series.d2phi, 2.0)

    def test_frozen_cosine(self):
        s = State(0.0, TWO_PI, np.stack([np.cos(TWO_PI.nodes), np.zeros(16), np.zeros(16), np.zeros(16)]))
        phi, dphi, d2phi = phi_at(s, certificate(b=0.0, t0=0.0), EXP, EXP)
        self.assertAlmostEqual(phi, 2 * np.pi, places=12)
        self.assertEqual(dphi, 0.0)
        self.assertTrue(np.isnan(d2phi))


class TestConcavity(unittest.TestCase):
    @staticmethod
    def blowup_profile(dt: float):
        t = np.arange(0.0, 0.5 + 0.5 * dt, dt)
        return (1.0 - t) ** -2.0

    def test_saturating_profile_passes(self):
        report = verify_concavity_inequality(self.blowup_profile(1e-3), 0.5, 1e-3)
        self.assertTrue(report.passed)
        self.assertEqual(report.points, 499)

    def test_defect_is_second_order(self):
        coarse = verify_concavity_inequality(self.blowup_profile(2e-3), 0.5, 2e-3)
        fine = verify_concavity_inequality(self.blowup_profile(1e-3), 0.5, 1e-3)
        ratio = coarse.worst_margin / fine.worst_margin
        self.assertGreater(ratio, 3.5)
        self.assertLess(ratio, 4.5)

    def test_exponential_profile_fails(self):
        dt = 1e-3
        phi = np.exp(np.arange(0.0, 1.0, dt))
        report = verify_concavity_inequality(phi, 0.5, dt)
        self.assertFalse(report.passed)
        self.assertLess(report.worst_scaled_margin, -1e-7)

    def test_arguments(self):
        with self.assertRaises(ValueError):
            verify_concavity_inequality([1.0, 2.0, 3.0, 4.0], 0.5, 0.1)
        with self.assertRaises(ValueError):
            verify_concavity_inequality(np.ones(10), 0.5, 0.0)

    def test_along_trajectory(self):
        t = np.linspace(0.0, 0.5, 11)
        x = 1.0 - t
        series = PhiSeries(times=t, phi=x ** -2, dphi=2 * x ** -3, d2phi=6 * x ** -4)
        self.assertTrue(verify_concavity_along_trajectory(series, 0.5).passed)
        self.assertFalse(verify_concavity_along_trajectory(series, 1.0).passed)

    def test_trajectory_without_second_derivative(self):
        series = PhiSeries(times=np.zeros(3), phi=np.ones(3), dphi=np.ones(3), d2phi=np.full(3, np.nan))
        with self.assertRaises(ValueError):
            verify_concavity_along_trajectory(series, 0.5)


class TestBounds(unittest.TestCase):
    def test_kinetic_bound(self):
        init = InitialData(TWO_PI.sample(lambda x: 0.5 * np.cos(x)), TWO_PI.zeros(),
                           TWO_PI.sample(lambda x: 0.4 * np.sin(x)), TWO_PI.zeros())
        nl = quartic_family(1, 0)
        E0 = energy(init.to_state(), EXP, EXP, nl).total
        result = integrate(init, EvolutionConfig(dt=0.01, t_end=3.0, stride=30), EXP, EXP, nl)
        for snapshot in result.snapshots:
            kinetic, bound = kinetic_a_priori_bound(snapshot.state, E0, 0.0, EXP, EXP)
            self.assertLessEqual(kinetic, bound + 1e-10)

    def test_coercivity(self):
        w = TWO_PI.sample(lambda x: np.sin(2 * x) + np.cos(3 * x))
        for k in (EXP, higher_order_kernel(1, 1), higher_order_kernel(0.5, 3)):
            self.assertGreaterEqual(coercivity_margin(k, w), -1e-12)

    def test_local_energy_density(self):
        s = State(0.0, TWO_PI, np.stack([np.ones(16), np.zeros(16), np.full(16, 2.0), np.zeros(16)]))
        density = local_energy_density(s, 1.0, quartic_family(1, 0))
        assert_allclose(density.values, 2.0 + 0.5 * (1.0 + 0.5))


if __name__ == '__main__':
    unittest.main()
