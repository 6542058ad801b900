"""
Tests for the Hatsugai-Kohmoto band model
"""

import math
import os
import sys
import tempfile
import unittest
from pathlib import Path

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from fcilab.hk import (
    HKError,
    InvalidLattice,
    allowed_momenta,
    band_energies,
    band_gap,
    band_structure_csv,
    bloch_matrix,
    hk_size,
    lower_state,
    lower_vectors,
    norm_zero_point,
    realspace_hamiltonian,
    reduce_momentum,
    translation_operator,
)
from fcilab.config import DEFAULT_LIMITS
from fcilab.models import HKLatticeSize, HKParams


class TestBlochForm(unittest.TestCase):
    """Momentum-space Hamiltonian and gauge-fixed eigenvector"""

    def setUp(self):
        self.params = HKParams(1.0, 1.0, 1.0)

    def test_bloch_matrix_hermitian(self):
        """Bloch matrix is Hermitian with eigenvalues +-E"""
        for k in ((0.3, -1.2), (math.pi, 0.5), (-2.0, 2.9)):
            matrix = bloch_matrix(self.params, *k)
            np.testing.assert_allclose(matrix, matrix.conj().T)
            lower, upper = band_energies(self.params, *k)
            np.testing.assert_allclose(np.linalg.eigvalsh(matrix), [lower, upper], atol=1e-12)

    def test_lower_vector_is_eigenvector(self):
        """Gauge-fixed vector solves H v = E- v"""
        state = lower_state(self.params, (0.7, -0.4))
        matrix = bloch_matrix(self.params, 0.7, -0.4)
        np.testing.assert_allclose(matrix @ state.normalized, state.energies[0] * state.normalized, atol=1e-12)

    def test_norm_zero_point(self):
        """Eigenvector vanishes at (pi, pi) for t2 > 0 and at (pi, 0) for t2 < 0"""
        self.assertEqual(norm_zero_point(self.params), (math.pi, math.pi))
        self.assertTrue(lower_state(self.params, (math.pi, math.pi)).singular)
        negative = HKParams(1.0, -1.0, 1.0)
        self.assertEqual(norm_zero_point(negative), (math.pi, 0.0))
        self.assertTrue(lower_state(negative, (math.pi, 0.0)).singular)
        with self.assertRaises(ValueError):
            lower_state(self.params, (math.pi, math.pi)).normalized
        with self.assertRaises(HKError):
            norm_zero_point(HKParams(1.0, 0.0, 1.0))

    def test_norm_zero_is_unique(self):
        """On a 128 x 128 scan only the (pi, pi) point has a vanishing vector"""
        grid = 128
        mesh = 2 * np.pi * np.arange(grid) / grid
        k1, k2 = np.meshgrid(mesh, mesh, indexing='ij')
        for params in (self.params, HKParams(1.0, 0.5, -0.7), HKParams(-2.0, 1.0, 0.3)):
            with self.subTest(params=params):
                _, _, norm = lower_vectors(params, k1, k2)
                zeros = np.argwhere(norm < DEFAULT_LIMITS.singular_tolerance)
                self.assertEqual(zeros.tolist(), [[grid // 2, grid // 2]])

    def test_reduce_momentum(self):
        """Components land in [-pi, pi)"""
        k1, k2 = reduce_momentum((3 * math.pi, 0.5 - 2 * math.pi))
        self.assertAlmostEqual(k1, -math.pi)
        self.assertAlmostEqual(k2, 0.5)


class TestBandGap(unittest.TestCase):
    """Direct gap search"""

    def test_gapped(self):
        """Finite gap with every hopping present"""
        self.assertGreater(band_gap(HKParams(1.0, 1.0, 1.0)).gap, 0.5)

    def test_gap_positive_over_parameters(self):
        for t1 in (-1.0, 0.5, 2.0):
            for t2 in (0.25, 1.0, 3.0):
                for td in (-1.5, -0.1, 0.4, 1.0):
                    with self.subTest(t1=t1, t2=t2, td=td):
                        self.assertGreater(band_gap(HKParams(t1, t2, td)).gap, 0.0)

    def test_gapless_without_diagonals(self):
        """td = 0 closes the gap at k1 = pi, k2 = pi/2"""
        self.assertLess(band_gap(HKParams(1.0, 1.0, 0.0)).gap, 1e-8)

    def test_gapless_without_horizontal(self):
        """t1 = 0 closes the gap at k1 = 0, k2 = pi/2"""
        self.assertLess(band_gap(HKParams(0.0, 1.0, 1.0)).gap, 1e-8)

    def test_grid_floor(self):
        with self.assertRaises(ValueError):
            band_gap(HKParams(1.0, 1.0, 1.0), grid=8)


class TestRealSpace(unittest.TestCase):
    """Real-space matrix on the twisted torus"""

    def setUp(self):
        self.params = HKParams(1.0, 0.7, 0.4)
        self.size = HKLatticeSize(2, 3)

    def test_exactly_hermitian(self):
        matrix = realspace_hamiltonian(self.params, self.size, (0.3, 1.1))
        self.assertTrue(np.array_equal(matrix, matrix.conj().T))

    def test_spectrum_matches_bloch_bands(self):
        """Eigenvalues are E+- at the twisted allowed momenta"""
        twists = (0.3, 1.1)
        matrix = realspace_hamiltonian(self.params, self.size, twists)
        expected = []
        for k1, k2 in allowed_momenta(self.size, twists):
            expected.extend(band_energies(self.params, k1, k2))
        np.testing.assert_allclose(np.linalg.eigvalsh(matrix), sorted(expected), atol=1e-10)

    def test_four_by_four_cells(self):
        """(1, 1, 0.5) on L1 = L2 = 4, untwisted"""
        params = HKParams(1.0, 1.0, 0.5)
        size = HKLatticeSize(4, 4)
        expected = []
        for k1, k2 in allowed_momenta(size):
            expected.extend(band_energies(params, k1, k2))
        self.assertEqual(len(expected), size.dimension)
        eigenvalues = np.linalg.eigvalsh(realspace_hamiltonian(params, size))
        np.testing.assert_allclose(eigenvalues, sorted(expected), atol=1e-10)

    def test_single_cell_torus(self):
        """L1 = 1 keeps both horizontal bonds"""
        size = HKLatticeSize(1, 2)
        matrix = realspace_hamiltonian(HKParams(1.0, 1.0, 0.5), size)
        np.testing.assert_allclose(np.linalg.eigvalsh(matrix), [-2 * math.sqrt(2)] * 2 + [2 * math.sqrt(2)] * 2,
                                   atol=1e-12)

    def test_translations(self):
        """Cell and row shifts commute; a single-column shift flips t2"""
        matrix = realspace_hamiltonian(self.params, self.size)
        for shift in ((2, 0), (0, 1)):
            perm = translation_operator(self.size, shift)
            self.assertTrue(np.allclose(matrix[np.ix_(perm, perm)], matrix))
        perm = translation_operator(self.size, (1, 0))
        self.assertFalse(np.allclose(matrix[np.ix_(perm, perm)], matrix))

    def test_hk_size(self):
        self.assertEqual(hk_size(4, 4), HKLatticeSize(2, 4))
        with self.assertRaises(InvalidLattice):
            hk_size(5, 4)


class TestBandStructureCsv(unittest.TestCase):

    def test_rows(self):
        """Header plus grid^2 rows, k2 fastest"""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "bands.csv"
            band_structure_csv(HKParams(1.0, 1.0, 1.0), 4, path)
            lines = path.read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[0], "k1,k2,E_minus,E_plus")
        self.assertEqual(len(lines), 17)
        first, second = lines[1].split(','), lines[2].split(',')
        self.assertEqual(first[0], second[0])
        self.assertNotEqual(first[1], second[1])


if __name__ == '__main__':
    unittest.main()
