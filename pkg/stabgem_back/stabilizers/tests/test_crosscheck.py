"""
Tests for the batch oracle cross-check.

Tests cover random Clifford states, the sampled comparison report and the
per-state check used by `--oracle-check`.
"""

from __future__ import annotations

import numpy as np
from django.test import SimpleTestCase

from stabilizers import oracle
from stabilizers.codes import make_ghz_state, make_toric, symmetric_mixed_state
from stabilizers.crosscheck import check_against_oracle, crosscheck, random_clifford_state
from stabilizers.exceptions import InputError
from stabilizers.pauli import PauliOperator


class RandomCliffordStateTests(SimpleTestCase):
    """Test cases for random_clifford_state."""

    def test_group_stabilizes_vector(self):
        """Test every group row fixes the simulated vector."""
        state, vec = random_clifford_state(5, 4, seed=12)
        for row in state.group.rows:
            np.testing.assert_allclose(oracle.apply_word(vec, row), vec, atol=1e-10)

    def test_seeded(self):
        """Test equal seeds give equal states."""
        a, _ = random_clifford_state(4, 3, seed=1)
        b, _ = random_clifford_state(4, 3, seed=1)
        self.assertEqual([r.label for r in a.group.rows], [r.label for r in b.group.rows])


class CrossCheckTests(SimpleTestCase):
    """Test cases for crosscheck and check_against_oracle."""

    def test_small_batch_passes(self):
        """Test sixty samples on up to six qubits agree with the oracle."""
        report = crosscheck(samples=60, n_max=6, depth=3, seed=5)
        self.assertTrue(report.passed)
        self.assertLessEqual(report.max_deviation, 1e-10)
        self.assertEqual(report.per_kind, {"expectation": 20, "overlap": 20, "reduced_fidelity": 20})
        self.assertTrue(report.as_dict()["passed"])

    def test_full_batch(self):
        """Test five hundred quantities on up to ten qubits stay within 1e-10 of the oracle."""
        report = crosscheck(samples=500, n_max=10)
        self.assertTrue(report.passed, report.failures[:3])
        self.assertLess(report.max_deviation, 1e-10)
        self.assertEqual(sum(report.per_kind.values()), 500)
        self.assertEqual(report.per_kind["expectation"], 167)

    def test_needs_two_qubits(self):
        """Test n_max below 2 is rejected."""
        with self.assertRaises(InputError):
            crosscheck(samples=3, n_max=1)

    def test_pure_state_check(self):
        """Test a GHZ state passes the per-state check."""
        n = 4
        ops = [PauliOperator.on_qubits(n, [0, 3], "Z"), PauliOperator.on_qubits(n, [1], "X")]
        self.assertLessEqual(check_against_oracle(make_ghz_state(n), ops), 1e-10)

    def test_mixed_state_check(self):
        """Test the symmetric toric L=2 state passes with generators and a logical."""
        code = make_toric(2)
        (z_row, _), _ = code.known_logicals
        deviation = check_against_oracle(symmetric_mixed_state(code), [*code.generators, z_row])
        self.assertLessEqual(deviation, 1e-10)
