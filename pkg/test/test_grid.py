import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from nonlocal_wave_toolbox.exceptions import GridError, GridMismatchError, SymbolError
from nonlocal_wave_toolbox.grid import (Grid, RealField, apply_symbol, derivative, forward, inner_product, inverse,
                                        l2_norm, mean, sobolev_norm, sup_norm, vector_sobolev_norm,
                                        vector_sup_norm)

TWO_PI = Grid(16, 2 * np.pi)

coefficients = st.lists(st.floats(min_value=-1, max_value=1, allow_nan=False), min_size=9, max_size=9)


def band_limited(grid: Grid, c) -> RealField:
    """c[0] + sum over m = 1..4 of c[2m-1] cos(mx) + c[2m] sin(mx) on a 2 pi grid."""
    x = grid.nodes
    values = c[0] + sum(c[2 * m - 1] * np.cos(m * x) + c[2 * m] * np.sin(m * x) for m in range(1, 5))
    return grid.field(values)


class TestGrid(unittest.TestCase):
    def test_rejects_bad_node_count(self):
        for n in (2, 6, 100, 0):
            with self.assertRaises(GridError):
                Grid(n, 1.0)

    def test_rejects_bad_period(self):
        for period in (0.0, -1.0, float('inf')):
            with self.assertRaises(GridError):
                Grid(16, period)

    def test_nodes_and_frequencies(self):
        grid = Grid(8, 4.0)
        assert_allclose(grid.nodes, [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5])
        self.assertEqual(np.count_nonzero(grid.frequencies == 0), 1)
        self.assertEqual(grid.rfrequencies.shape, (5,))
        assert_allclose(grid.rfrequencies, 2 * np.pi * np.arange(5) / 4.0)

    def test_field_shape_is_checked(self):
        with self.assertRaises(GridError):
            RealField(TWO_PI, np.zeros(8))

    def test_field_is_read_only(self):
        u = TWO_PI.sample(np.cos)
        with self.assertRaises(ValueError):
            u.values[0] = 1.0

    def test_corrupted_field_is_detectable(self):
        values = np.zeros(16)
        values[3] = np.nan
        self.assertFalse(TWO_PI.field(values).is_finite)
        self.assertTrue(TWO_PI.zeros().is_finite)


class TestApplySymbol(unittest.TestCase):
    def test_identity_symbol(self):
        u = band_limited(TWO_PI, [0.3, 1, -2, 0.5, 0, 0, 1, 0.2, 0.1])
        assert_allclose(apply_symbol(u, 1.0).values, u.values, atol=1e-14)

    def test_green_symbol_halves_first_mode(self):
        u = TWO_PI.sample(np.cos)
        result = apply_symbol(u, lambda xi: 1.0 / (1.0 + xi ** 2))
        assert_allclose(result.values, 0.5 * np.cos(TWO_PI.nodes), atol=1e-14)

    def test_second_derivative_symbol(self):
        u = TWO_PI.sample(np.sin)
        result = apply_symbol(u, lambda xi: -xi ** 2)
        assert_allclose(result.values, -np.sin(TWO_PI.nodes), atol=1e-13)

    def test_rejects_non_finite_symbol(self):
        u = TWO_PI.sample(np.cos)
        with np.errstate(divide='ignore'):
            with self.assertRaises(SymbolError):
                apply_symbol(u, lambda xi: 1.0 / xi)

    def test_derivative(self):
        u = TWO_PI.sample(np.sin)
        assert_allclose(derivative(u).values, np.cos(TWO_PI.nodes), atol=1e-13)
        assert_allclose(derivative(u, 2).values, -np.sin(TWO_PI.nodes), atol=1e-13)
        assert_allclose(derivative(u, 0).values, u.values)

    @settings(max_examples=50, deadline=None)
    @given(coefficients, coefficients, st.floats(-2, 2), st.floats(-2, 2))
    def test_linearity(self, c1, c2, alpha, beta):
        u, v = band_limited(TWO_PI, c1), band_limited(TWO_PI, c2)
        sigma = lambda xi: np.exp(-0.1 * xi ** 2)
        lhs = apply_symbol(alpha * u + beta * v, sigma)
        rhs = alpha * apply_symbol(u, sigma) + beta * apply_symbol(v, sigma)
        assert_allclose(lhs.values, rhs.values, atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(coefficients)
    def test_symbol_composition(self, c):
        u = band_limited(TWO_PI, c)
        s1 = lambda xi: 1.0 / (1.0 + xi ** 2)
        s2 = lambda xi: -xi ** 2
        lhs = apply_symbol(apply_symbol(u, s1), s2)
        rhs = apply_symbol(u, lambda xi: s1(xi) * s2(xi))
        assert_allclose(lhs.values, rhs.values, atol=1e-12)


class TestNorms(unittest.TestCase):
    def test_cosine_norms(self):
        u = TWO_PI.sample(np.cos)
        self.assertAlmostEqual(l2_norm(u), np.sqrt(np.pi), places=12)
        self.assertAlmostEqual(sobolev_norm(u, 1), np.sqrt(2 * np.pi), places=12)
        self.assertAlmostEqual(sobolev_norm(u, 0), l2_norm(u), places=12)
        self.assertAlmostEqual(sup_norm(u), 1.0, places=14)

    def test_negative_sobolev_index(self):
        with self.assertRaises(ValueError):
            sobolev_norm(TWO_PI.zeros(), -1)

    def test_inner_products(self):
        cos, sin = TWO_PI.sample(np.cos), TWO_PI.sample(np.sin)
        self.assertAlmostEqual(inner_product(cos, sin), 0.0, places=13)
        self.assertAlmostEqual(inner_product(cos, cos), np.pi, places=12)
        self.assertEqual(inner_product(cos, TWO_PI.zeros()), 0.0)

    def test_inner_product_grid_mismatch(self):
        with self.assertRaises(GridMismatchError):
            inner_product(TWO_PI.zeros(), Grid(32, 2 * np.pi).zeros())

    def test_mean_and_vector_norms(self):
        cos, sin = TWO_PI.sample(np.cos), TWO_PI.sample(np.sin)
        self.assertAlmostEqual(mean(TWO_PI.field(np.full(16, 2.5))), 2.5)
        self.assertAlmostEqual(vector_sup_norm([cos, 2 * sin]), 3.0, places=12)
        self.assertAlmostEqual(vector_sobolev_norm([cos, sin], 1), 2 * np.sqrt(2 * np.pi), places=12)

    @settings(max_examples=50, deadline=None)
    @given(coefficients)
    def test_round_trip(self, c):
        u = band_limited(TWO_PI, c)
        scale = max(1.0, sup_norm(u))
        assert_allclose(inverse(forward(u)).values, u.values, atol=1e-12 * scale)

    @settings(max_examples=50, deadline=None)
    @given(coefficients)
    def test_parseval(self, c):
        u = band_limited(TWO_PI, c)
        spectral = np.sqrt(np.sum(TWO_PI.parseval_weights * np.abs(forward(u).coefficients) ** 2))
        self.assertAlmostEqual(spectral, l2_norm(u), delta=1e-12 * max(1.0, l2_norm(u)))


if __name__ == '__main__':
    unittest.main()
