import unittest

import numpy as np

from nonlocal_wave_toolbox.hypotheses import (HYPOTHESIS_CHECKS, check_blowup_growth, check_exactness,
                                              check_global_G_bound, check_global_g_power_bound, covering_box,
                                              run_check, sample_box)
from nonlocal_wave_toolbox.nonlinearity import custom_nonlinearity, quartic_family

BOX = ((-3, 3), (-3, 3))


class TestSampling(unittest.TestCase):
    def test_sample_box(self):
        u1, u2 = sample_box(((0, 1), (-1, 1)), samples=3)
        self.assertEqual(u1.shape, (3, 3))
        self.assertEqual(u1[2, 0], 1.0)
        self.assertEqual(u2[0, 2], 1.0)

    def test_bad_samples(self):
        with self.assertRaises(ValueError):
            sample_box(BOX, samples=0)
        with self.assertRaises(ValueError):
            sample_box(((1, 0), (0, 1)))

    def test_covering_box(self):
        self.assertEqual(covering_box(1.0, 2.0), ((-1.1, 1.1), (-2.2, 2.2)))


class TestExactness(unittest.TestCase):
    def test_gradient_field_passes(self):
        self.assertTrue(check_exactness(quartic_family(1, 3), BOX).passed)

    def test_rotation_fails(self):
        rotation = custom_nonlinearity(lambda a, b: 0 * a, lambda a, b: b, lambda a, b: -a, name='rotation')
        report = check_exactness(rotation, BOX, samples=11)
        self.assertFalse(report.passed)
        self.assertAlmostEqual(report.worst_margin, -2.0, places=6)


class TestBlowupGrowth(unittest.TestCase):
    def test_focusing_quartic(self):
        nl = quartic_family(-1, 0)
        for nu in (0.1, 0.25, 0.5):
            self.assertTrue(check_blowup_growth(nl, nu, BOX).passed, msg=f'nu={nu}')

    def test_defocusing_quartic_with_small_nu(self):
        report = check_blowup_growth(quartic_family(1, 0), 0.25, BOX)
        self.assertFalse(report.passed)
        # margin is 2 nu s + (nu - 1/2) (u1^4 + u2^4), worst at a corner
        self.assertAlmostEqual(report.worst_margin, 0.5 * 18 - 0.25 * 162, places=9)
        self.assertEqual(tuple(np.abs(report.worst_point)), (3.0, 3.0))

    def test_nu_must_be_positive(self):
        with self.assertRaises(ValueError):
            check_blowup_growth(quartic_family(-1, 0), 0.0, BOX)


class TestGlobalBounds(unittest.TestCase):
    def test_G_bound(self):
        self.assertTrue(check_global_G_bound(quartic_family(1, 0), 0, BOX).passed)
        self.assertFalse(check_global_G_bound(quartic_family(-1, 0), 1, BOX).passed)
        # -u^4/4 >= -u^2 holds while u^2 <= 4
        self.assertTrue(check_global_G_bound(quartic_family(-1, 0), 1, ((-1.4, 1.4), (-1.4, 1.4))).passed)

    def test_g_power_bound(self):
        nl = quartic_family(1, 0)
        self.assertTrue(check_global_g_power_bound(nl, Cb=4, k=0, q1=4 / 3, box=BOX).passed)
        self.assertFalse(check_global_g_power_bound(nl, Cb=4, k=0, q1=2, box=BOX).passed)

    def test_g_power_bound_trivial_nonlinearity(self):
        zero = custom_nonlinearity(lambda a, b: 0 * a, lambda a, b: 0 * a, lambda a, b: 0 * b)
        report = check_global_g_power_bound(zero, Cb=1, k=0, q1=2, q2=3, box=BOX)
        self.assertTrue(report.passed)
        self.assertEqual(report.worst_margin, 0.0)

    def test_g_power_bound_parameters(self):
        with self.assertRaises(ValueError):
            check_global_g_power_bound(quartic_family(1, 0), Cb=4, k=0, q1=1.0, box=BOX)


class TestRunCheck(unittest.TestCase):
    def test_dispatch(self):
        self.assertEqual(set(HYPOTHESIS_CHECKS), {'exactness', 'gradient_consistency', 'blowup_growth',
                                                  'global_G_bound', 'global_g_power_bound'})
        report = run_check('blowup_growth', quartic_family(-1, 0), BOX, samples=21, nu=0.5)
        self.assertEqual(report.predicate, 'blowup_growth')
        self.assertEqual(report.samples, 21)
        self.assertEqual(report.as_dict()['box'], [[-3.0, 3.0], [-3.0, 3.0]])

    def test_unknown_predicate(self):
        with self.assertRaises(ValueError):
            run_check('convexity', quartic_family(1, 0), BOX)


if __name__ == '__main__':
    unittest.main()
