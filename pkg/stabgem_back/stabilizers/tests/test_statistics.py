"""
Tests for exact Pauli expectations and anyon statistics.

Tests cover stabilizer expectations against the dense oracle, braiding
and exchange phases, dressing invariance, the symmetry check and the
CZX expectation.
"""

from __future__ import annotations

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from stabilizers import oracle
from stabilizers.circuits import dress, random_circuit
from stabilizers.codes import (
    make_ghz_state,
    make_honeycomb_fermion,
    make_toric,
    symmetric_mixed_state,
    zero_state,
)
from stabilizers.crosscheck import random_clifford_state
from stabilizers.exceptions import InputError
from stabilizers.logicals import code_word
from stabilizers.pauli import PauliOperator, product
from stabilizers.statistics import (
    braiding_phase,
    czx_expectation,
    exchange_phase,
    exchange_word,
    expectation_scan,
    pauli_expectation,
    verify_one_form_symmetry,
)
from stabilizers.strings import ExchangeTriple, canonical_t_junction


class PauliExpectationTests(SimpleTestCase):
    """Test cases for pauli_expectation."""

    def setUp(self):
        """Set up test data for each test."""
        self.code = make_toric(3)
        self.state = code_word(self.code)

    def test_generator_is_plus_one(self):
        """Test every generator has expectation +1."""
        self.assertEqual(expectation_scan(self.state, self.code.generators), [1] * len(self.code.generators))

    def test_single_edge_is_zero(self):
        """Test a lone X anticommutes with its plaquettes."""
        self.assertEqual(pauli_expectation(self.state, PauliOperator.on_qubits(18, [0], "X")), 0)

    def test_phases(self):
        """Test signed and imaginary multiples of members."""
        star = self.code.generators[0]
        self.assertEqual(pauli_expectation(self.state, -star), -1)
        self.assertEqual(pauli_expectation(self.state, star.with_phase(1)), 1j)

    def test_size_mismatch(self):
        """Test operators must act on the state's qubits."""
        with self.assertRaises(InputError):
            pauli_expectation(self.state, PauliOperator.from_label("X"))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 7), st.integers(0, 10_000))
    def test_matches_dense_oracle(self, n, seed):
        """Test random expectations agree with the dense trace."""
        state, vec = random_clifford_state(n, 3, seed)
        rng = np.random.default_rng(seed)
        p = PauliOperator(rng.integers(2, size=n), rng.integers(2, size=n), int(rng.integers(4)))
        self.assertAlmostEqual(abs(pauli_expectation(state, p) - oracle.expectation(vec, p)), 0, places=10)


class BraidingPhaseTests(SimpleTestCase):
    """Test cases for braiding_phase."""

    def setUp(self):
        """Set up test data for each test."""
        self.code = make_toric(3)
        self.state = code_word(self.code)
        self.star = self.code.generators[0]
        # a Z on one edge of the star creates a pair of charges; one sits inside the loop
        self.open = PauliOperator.on_qubits(self.code.n, [0], "Z")

    def test_crossing_pair(self):
        """Test an open string crossing a loop once braids to -1."""
        self.assertEqual(braiding_phase(self.state, self.open, self.star), -1)

    def test_identity_open_string(self):
        """Test an identity open string gives +1."""
        self.assertEqual(braiding_phase(self.state, PauliOperator.identity(self.code.n), self.star), 1)

    def test_dressing_invariance(self):
        """Test the phase survives dressing state and operators by a depth-1 circuit."""
        for seed in range(5):
            circuit = random_circuit(self.code.layout, 1, seed=seed)
            value = braiding_phase(
                dress(self.state, circuit), dress(self.open, circuit), dress(self.star, circuit)
            )
            self.assertEqual(value, -1)

    def test_toric_sizes(self):
        """Test a star and a 2x2 loop braid to -1 with a crossing string for L = 2..6."""
        for L in range(2, 7):
            code = make_toric(L)
            state = code_word(code)
            edge = [PauliOperator.on_qubits(code.n, [q], "Z") for q in (0, 1)]
            self.assertEqual(braiding_phase(state, edge[0], code.generators[0]), -1)
            if L < 3:
                continue
            loop = product(code.generators[j * L + i] for j in (0, 1) for i in (0, 1))
            # h(1, 0) leaves the block, h(0, 0) stays inside it
            self.assertEqual(braiding_phase(state, edge[1], loop), -1)
            self.assertEqual(braiding_phase(state, edge[0], loop), 1)


class ExchangePhaseTests(SimpleTestCase):
    """Test cases for exchange_word and exchange_phase."""

    def setUp(self):
        """Set up test data for each test."""
        self.code = make_honeycomb_fermion(4, 4)
        self.state = symmetric_mixed_state(self.code)
        self.triple = canonical_t_junction(self.code, junction=0)

    def test_fermionic_junction(self):
        """Test the canonical junction gives -1."""
        self.assertEqual(exchange_phase(self.state, self.triple), -1)

    def test_identity_strings(self):
        """Test one anticommuting pair gives -1 and none gives +1."""
        identity = PauliOperator.identity(self.code.n)
        one_pair = ExchangeTriple(self.triple.m1, self.triple.m2, identity, 0, {})
        self.assertEqual(exchange_phase(self.state, one_pair), -1)
        trivial = ExchangeTriple(self.triple.m1, identity, identity, 0, {})
        self.assertEqual(exchange_phase(self.state, trivial), 1)

    def test_word_is_minus_identity(self):
        """Test the exchange word of pairwise anticommuting strings is -I."""
        word = exchange_word(self.triple.m1, self.triple.m2, self.triple.m3)
        self.assertTrue(word.is_identity)
        self.assertEqual(word.phase, 2)

    def test_matches_dense_oracle(self):
        """Test the phase agrees with the dense density matrix at n = 8."""
        code = make_honeycomb_fermion(4, 2)
        state = symmetric_mixed_state(code)
        triple = canonical_t_junction(code, junction=0)
        word = exchange_word(triple.m1, triple.m2, triple.m3)
        dense = oracle.expectation(oracle.from_stabilizer(state), word)
        self.assertAlmostEqual(abs(exchange_phase(state, triple) - dense), 0, places=10)


class SymmetryTests(SimpleTestCase):
    """Test cases for verify_one_form_symmetry."""

    def test_symmetric_mixed_state(self):
        """Test the symmetric honeycomb state satisfies every hexagon."""
        code = make_honeycomb_fermion(4, 4)
        check = verify_one_form_symmetry(symmetric_mixed_state(code), code)
        self.assertTrue(check)
        self.assertEqual(check.violations, ())

    def test_zero_state_violates_all(self):
        """Test |0...0> has expectation 0 on every hexagon."""
        code = make_honeycomb_fermion(4, 4)
        check = verify_one_form_symmetry(zero_state(code.n), code)
        self.assertFalse(check)
        self.assertEqual(check.violations, tuple(range(len(code.generators))))
        self.assertEqual(set(check.expectations), {0})

    def test_toric_ground_state(self):
        """Test a toric code word is symmetric under its own code."""
        code = make_toric(4)
        self.assertTrue(verify_one_form_symmetry(code_word(code), code))


class CZXTests(SimpleTestCase):
    """Test cases for czx_expectation."""

    def test_ghz_even_ring(self):
        """Test GHZ on six qubits has CZX expectation +1."""
        self.assertAlmostEqual(czx_expectation(make_ghz_state(6), 6), 1)

    def test_zero_state(self):
        """Test |0...0> has CZX expectation 0."""
        self.assertAlmostEqual(czx_expectation(zero_state(4), 4), 0)
