"""
Tests for GF(2) elimination.

Tests cover rank, null spaces on both sides, linear solves and the
tracked transform of the bit-packed row reduction.
"""

from __future__ import annotations

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from stabilizers import gf2

bit_matrices = st.tuples(st.integers(1, 12), st.integers(1, 20)).flatmap(
    lambda shape: arrays(np.uint8, shape, elements=st.integers(0, 1))
)


class RowReductionTests(SimpleTestCase):
    """Test cases for row_reduce and rank."""

    def test_rank_of_identity(self):
        """Test the identity has full rank."""
        self.assertEqual(gf2.rank(np.eye(5, dtype=np.uint8)), 5)

    def test_rank_of_repeated_rows(self):
        """Test equal rows count once."""
        self.assertEqual(gf2.rank([[1, 1, 0], [1, 1, 0], [0, 0, 0]]), 1)

    def test_rank_of_empty_matrix(self):
        """Test an empty matrix has rank zero."""
        self.assertEqual(gf2.rank(np.zeros((0, 4), dtype=np.uint8)), 0)

    def test_pivots_are_lowest_columns(self):
        """Test pivots come out column by column."""
        ech = gf2.row_reduce([[0, 1, 1], [1, 0, 1]])
        self.assertEqual(ech.pivots, (0, 1))
        np.testing.assert_array_equal(ech.rref, [[1, 0, 1], [0, 1, 1]])

    @settings(max_examples=60, deadline=None)
    @given(bit_matrices)
    def test_transform_reproduces_rref(self, matrix):
        """Test T @ M equals the reduced matrix over GF(2)."""
        ech = gf2.row_reduce(matrix, track=True)
        np.testing.assert_array_equal((ech.transform.astype(int) @ matrix) % 2, ech.rref)

    @settings(max_examples=60, deadline=None)
    @given(bit_matrices)
    def test_rank_matches_transpose(self, matrix):
        """Test row rank equals column rank."""
        self.assertEqual(gf2.rank(matrix), gf2.rank(matrix.T))


class NullspaceTests(SimpleTestCase):
    """Test cases for nullspace and left_nullspace."""

    @settings(max_examples=60, deadline=None)
    @given(bit_matrices)
    def test_nullspace_vectors_are_annihilated(self, matrix):
        """Test every null vector solves M v = 0 and the count is cols - rank."""
        basis = gf2.nullspace(matrix)
        self.assertEqual(basis.shape[0], matrix.shape[1] - gf2.rank(matrix))
        if basis.shape[0]:
            self.assertFalse(((matrix.astype(int) @ basis.T.astype(int)) % 2).any())
            self.assertEqual(gf2.rank(basis), basis.shape[0])

    @settings(max_examples=60, deadline=None)
    @given(bit_matrices)
    def test_left_nullspace_vectors_are_annihilated(self, matrix):
        """Test every left null vector solves a M = 0 and the count is rows - rank."""
        basis = gf2.left_nullspace(matrix)
        self.assertEqual(basis.shape[0], matrix.shape[0] - gf2.rank(matrix))
        if basis.shape[0]:
            self.assertFalse(((basis.astype(int) @ matrix.astype(int)) % 2).any())


class SolveTests(SimpleTestCase):
    """Test cases for solve_rows, solve_linear and independent_rows."""

    @settings(max_examples=60, deadline=None)
    @given(bit_matrices, st.integers(0, 2**32 - 1))
    def test_solve_linear_consistent_system(self, matrix, seed):
        """Test a right-hand side built from a known vector is solved."""
        rng = np.random.default_rng(seed)
        v = rng.integers(0, 2, size=matrix.shape[1]).astype(np.uint8)
        rhs = (matrix.astype(int) @ v) % 2
        solution = gf2.solve_linear(matrix, rhs)
        self.assertIsNotNone(solution)
        np.testing.assert_array_equal((matrix.astype(int) @ solution) % 2, rhs)

    def test_solve_linear_inconsistent_system(self):
        """Test an inconsistent system returns None."""
        self.assertIsNone(gf2.solve_linear([[1, 0], [1, 0]], [0, 1]))

    def test_solve_rows_outside_span(self):
        """Test a target outside the row span returns None."""
        self.assertIsNone(gf2.solve_rows([[1, 1, 0]], [0, 0, 1]))

    def test_solve_rows_combination(self):
        """Test the coefficients reproduce the target."""
        matrix = np.array([[1, 1, 0], [0, 1, 1]], dtype=np.uint8)
        coeffs = gf2.solve_rows(matrix, [1, 0, 1])
        np.testing.assert_array_equal(coeffs, [1, 1])

    def test_independent_rows_greedy_from_top(self):
        """Test repeated rows are skipped and the first occurrence kept."""
        self.assertEqual(gf2.independent_rows([[1, 0], [1, 0], [0, 1]]), [0, 2])

    def test_reduce_against_needs_transform(self):
        """Test reducing against an untracked echelon form raises."""
        with self.assertRaises(ValueError):
            gf2.reduce_against(gf2.row_reduce([[1, 0]]), np.array([1, 0]))
