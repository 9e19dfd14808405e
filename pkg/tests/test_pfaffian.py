"""
Tests for Pfaffian evaluation
"""

import math
import unittest

import numpy as np

from src.gammachain.errors import InvalidParameterError
from src.gammachain.pfaffian import pfaffian, pfaffian_batch, pfaffian_value


def random_skew(n, rng, complex_valued=False):
    A = rng.normal(size=(n, n))
    if complex_valued:
        A = A + 1j * rng.normal(size=(n, n))
    return A - A.T


class TestPfaffian(unittest.TestCase):
    """Test Pfaffians against closed forms and determinants"""

    def setUp(self):
        self.rng = np.random.default_rng(1234)

    def test_two_by_two(self):
        """Test Pf [[0, a], [-a, 0]] = a"""
        self.assertAlmostEqual(pfaffian_value([[0.0, -2.5], [2.5, 0.0]]), -2.5)

    def test_four_by_four_formula(self):
        """Test the explicit 4x4 expansion"""
        A = random_skew(4, self.rng)
        expected = A[0, 1] * A[2, 3] - A[0, 2] * A[1, 3] + A[0, 3] * A[1, 2]
        self.assertAlmostEqual(pfaffian_value(A), expected, places=12)

    def test_block_diagonal(self):
        """Test Pf of 2x2 blocks is the product of entries"""
        A = np.zeros((6, 6))
        for i, value in enumerate((1.0, 2.0, 3.0)):
            A[2 * i, 2 * i + 1] = value
            A[2 * i + 1, 2 * i] = -value
        self.assertAlmostEqual(pfaffian_value(A), 6.0)

    def test_square_is_determinant(self):
        """Test Pf^2 = det on large real matrices, in log form"""
        for n in (100, 400):
            A = random_skew(n, self.rng)
            sign, log_pf = pfaffian(A)
            det_sign, log_det = np.linalg.slogdet(A)
            self.assertEqual(abs(sign), 1.0)
            self.assertEqual(det_sign, 1.0)
            self.assertAlmostEqual(2.0 * log_pf, log_det, delta=1e-8 * abs(log_det))

    def test_permutation_sign(self):
        """Test Pf(P A P^T) = det(P) Pf(A)"""
        A = random_skew(8, self.rng)
        expected = pfaffian_value(A)
        for _ in range(10):
            P = np.eye(8)[self.rng.permutation(8)]
            value = pfaffian_value(P @ A @ P.T)
            self.assertAlmostEqual(value, np.linalg.det(P) * expected, delta=1e-10 * abs(expected))

    def test_scalar_multiple(self):
        """Test Pf(cA) = c^n Pf(A) for a 2n x 2n matrix"""
        A = random_skew(6, self.rng)
        expected = pfaffian_value(A)
        for c in (1.7, -2.0):
            self.assertAlmostEqual(pfaffian_value(c * A), c ** 3 * expected, delta=1e-10 * abs(c ** 3 * expected))

    def test_many_random_matrices(self):
        """Test Pf^2 = det over a batch"""
        matrices = [random_skew(20, self.rng) for _ in range(50)]
        for A, (sign, log_pf) in zip(matrices, pfaffian_batch(matrices)):
            value = sign * math.exp(log_pf)
            det = np.linalg.det(A)
            self.assertLess(abs(value ** 2 - det), 1e-8 * abs(det))

    def test_complex_matrix(self):
        """Test complex input keeps a unit-modulus sign"""
        A = random_skew(10, self.rng, complex_valued=True)
        sign, _ = pfaffian(A)
        self.assertAlmostEqual(abs(sign), 1.0)
        value = pfaffian_value(A)
        det = np.linalg.det(A)
        self.assertLess(abs(value ** 2 - det), 1e-8 * abs(det))

    def test_singular_matrix(self):
        """Test a zero matrix gives zero"""
        sign, log_pf = pfaffian(np.zeros((4, 4)))
        self.assertEqual(sign, 0.0)
        self.assertEqual(log_pf, -math.inf)
        self.assertEqual(pfaffian_value(np.zeros((4, 4))), 0.0)

    def test_invalid_input(self):
        """Test odd, non-square and non-antisymmetric input raise"""
        with self.assertRaises(InvalidParameterError):
            pfaffian(np.zeros((3, 3)))
        with self.assertRaises(InvalidParameterError):
            pfaffian(np.zeros((2, 4)))
        with self.assertRaises(InvalidParameterError):
            pfaffian(np.ones((2, 2)))


if __name__ == '__main__':
    unittest.main()
