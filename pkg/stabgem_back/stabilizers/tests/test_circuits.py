"""
Tests for Clifford circuits.

Tests cover gate parsing, layer validation, exact conjugation against
dense matrices, inverses, circuit files and dressing of operators,
codes and states.
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from stabilizers import oracle
from stabilizers.circuits import (
    CliffordCircuit,
    Gate,
    brick_layers,
    brick_wall,
    dress,
    load_circuit,
    neighbour_pairs,
    random_circuit,
    relabeling_circuit,
    simulate,
    spread,
)
from stabilizers.codes import chain_layout, make_ghz_state, make_toric
from stabilizers.exceptions import CodeValidationError, InputError, UnsupportedGateError
from stabilizers.pauli import PauliOperator, commutes


def unitary_of(circuit: CliffordCircuit) -> np.ndarray:
    dim = 2**circuit.n
    return np.column_stack([simulate(circuit, np.eye(dim, dtype=complex)[:, b]) for b in range(dim)])


class GateTests(SimpleTestCase):
    """Test cases for Gate.parse and layer validation."""

    def test_aliases(self):
        """Test CNOT and SDAG map to their canonical names."""
        self.assertEqual(Gate.parse("cnot", [0, 1]).name, "CX")
        self.assertEqual(Gate.parse("sdag", [2]).name, "SDG")

    def test_non_clifford_rejected(self):
        """Test T gates are outside the exact engine."""
        with self.assertRaises(UnsupportedGateError):
            Gate.parse("T", [0])

    def test_arity_checked(self):
        """Test gates need the right number of distinct qubits."""
        with self.assertRaises(InputError):
            Gate.parse("H", [0, 1])
        with self.assertRaises(InputError):
            Gate.parse("CZ", [1, 1])

    def test_layer_reuses_qubit(self):
        """Test a layer cannot touch a qubit twice."""
        with self.assertRaises(InputError):
            CliffordCircuit(3, [[Gate("H", (0,)), Gate("CX", (0, 1))]])

    def test_locality_enforced(self):
        """Test two-qubit gates must respect the locality radius."""
        with self.assertRaises(InputError):
            CliffordCircuit(4, [[Gate("CZ", (0, 3))]], layout=chain_layout(4), locality_radius=1.5)

    def test_depths(self):
        """Test depth counts layers and entangling depth counts two-qubit layers."""
        circuit = CliffordCircuit(3, [[Gate("H", (0,))], [Gate("CX", (0, 1))], []])
        self.assertEqual(circuit.depth, 3)
        self.assertEqual(circuit.entangling_depth, 1)
        self.assertEqual(relabeling_circuit(5, seed=2).entangling_depth, 0)


class BrickLayerTests(SimpleTestCase):
    """Test cases for brick_layers."""

    def test_chain_alternates_bonds(self):
        """Test a chain gets even bonds, then odd bonds, then even bonds again."""
        even, odd = [(0, 1), (2, 3)], [(1, 2), (3, 4)]
        self.assertEqual(brick_layers(chain_layout(5), 3), [even, odd, even])

    def test_toric_layers_are_local_matchings(self):
        """Test every layer pairs disjoint neighbours and the layers cover all neighbours."""
        layout = make_toric(3).layout
        layers = brick_layers(layout, 20)
        for pairs in layers:
            members = [q for pair in pairs for q in pair]
            self.assertEqual(len(members), len(set(members)))
            for a, b in pairs:
                self.assertLessEqual(layout.distance(a, b), 1.5)
        covered = {pair for pairs in layers for pair in pairs}
        self.assertEqual(covered, set(neighbour_pairs(layout, 1.5)))

    def test_isolated_qubits(self):
        """Test a layout without neighbours gives empty layers."""
        self.assertEqual(brick_layers(chain_layout(3), 2, radius=0.5), [[], []])


class ConjugationTests(SimpleTestCase):
    """Test cases for CliffordCircuit.conjugate and inverse."""

    def test_single_gate_rules(self):
        """Test H swaps X and Z, S maps X to Y and CX spreads X."""
        h = CliffordCircuit(1, [[Gate("H", (0,))]])
        s = CliffordCircuit(1, [[Gate("S", (0,))]])
        cx = CliffordCircuit(2, [[Gate("CX", (0, 1))]])
        self.assertEqual(h.conjugate(PauliOperator.from_label("X")), PauliOperator.from_label("Z"))
        self.assertEqual(h.conjugate(PauliOperator.from_label("Y")), PauliOperator.from_label("-Y"))
        self.assertEqual(s.conjugate(PauliOperator.from_label("X")), PauliOperator.from_label("Y"))
        self.assertEqual(s.conjugate(PauliOperator.from_label("Y")), PauliOperator.from_label("-X"))
        self.assertEqual(cx.conjugate(PauliOperator.from_label("XI")), PauliOperator.from_label("XX"))
        self.assertEqual(cx.conjugate(PauliOperator.from_label("IZ")), PauliOperator.from_label("ZZ"))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000), st.integers(0, 63), st.integers(0, 63), st.integers(0, 3))
    def test_matches_dense_conjugation(self, seed, xbits, zbits, phase):
        """Test U P U^dagger agrees with the dense matrices."""
        n = 3
        circuit = random_circuit(chain_layout(n), 3, seed=seed)
        p = PauliOperator([(xbits >> j) & 1 for j in range(n)], [(zbits >> j) & 1 for j in range(n)], phase)
        u = unitary_of(circuit)
        expected = u @ oracle.pauli_matrix(p) @ u.conj().T
        np.testing.assert_allclose(oracle.pauli_matrix(circuit.conjugate(p)), expected, atol=1e-10)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000))
    def test_inverse_undoes(self, seed):
        """Test conjugating by a circuit and its inverse is the identity map."""
        layout = chain_layout(5)
        circuit = brick_wall(layout, 4, seed=seed)
        p = PauliOperator.from_label("XYZIX")
        self.assertEqual(circuit.inverse().conjugate(circuit.conjugate(p)), p)

    def test_conjugate_all_matches_single(self):
        """Test the batched path agrees with one-at-a-time conjugation."""
        circuit = brick_wall(chain_layout(4), 3, seed=5)
        ops = [PauliOperator.from_label(s) for s in ("XXII", "-ZIZI", "IYYI")]
        self.assertEqual(circuit.conjugate_all(ops), [circuit.conjugate(p) for p in ops])

    def test_size_mismatch(self):
        """Test operators must match the circuit width."""
        with self.assertRaises(InputError):
            CliffordCircuit(2).conjugate(PauliOperator.from_label("X"))


class DressTests(SimpleTestCase):
    """Test cases for dress and spread."""

    def test_identity_circuit(self):
        """Test an empty circuit leaves an operator unchanged."""
        p = PauliOperator.from_label("-XZY")
        self.assertEqual(dress(p, CliffordCircuit(3)), p)

    def test_diagonal_layer_keeps_z_string(self):
        """Test phase-type gates leave a Z loop untouched."""
        code = make_toric(3)
        (z_row, _), _ = code.known_logicals
        layer = [Gate("S", (q,)) for q in range(0, code.n, 2)] + [Gate("CZ", (1, 3))]
        circuit = CliffordCircuit(code.n, [layer])
        self.assertEqual(dress(z_row, circuit), z_row)

    def test_dressed_code_stays_consistent(self):
        """Test a dressed code keeps commuting generators and logical pairs."""
        code = make_toric(3)
        circuit = random_circuit(code.layout, 2, seed=3)
        dressed = dress(code, circuit)
        self.assertEqual(dressed.k, code.k)
        for z, x in dressed.known_logicals:
            self.assertFalse(commutes(z, x))
            self.assertTrue(all(commutes(z, g) for g in dressed.generators))

    def test_dressed_state_matches_simulation(self):
        """Test dressing a GHZ state matches the dense circuit output."""
        state = make_ghz_state(4)
        circuit = brick_wall(chain_layout(4), 2, seed=11)
        dressed = dress(state, circuit)
        vec = simulate(circuit, oracle.from_stabilizer(state).amplitudes)
        self.assertAlmostEqual(oracle.fidelity(oracle.from_stabilizer(dressed), vec), 1.0, places=10)

    def test_lightcone(self):
        """Test a depth-t circuit spreads an operator by at most t radii."""
        code = make_toric(4)
        for seed in range(20):
            circuit = random_circuit(code.layout, 2, seed=seed, radius=1.5)
            p = PauliOperator.on_qubits(code.n, [seed % code.n], "X")
            self.assertLessEqual(spread(code.layout, p, dress(p, circuit)), 2 * 1.5 + 1e-9)

    def test_dress_rejects_other_objects(self):
        """Test only operators, codes and states can be dressed."""
        with self.assertRaises(InputError):
            dress("XZ", CliffordCircuit(2))


class CircuitFileTests(SimpleTestCase):
    """Test cases for load_circuit."""

    def setUp(self):
        """Set up test data for each test."""
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.path = Path(self.tmp.name) / "circuit.json"

    def test_load_valid_file(self):
        """Test a circuit file builds the listed layers."""
        self.path.write_text(
            json.dumps({"n": 3, "layers": [[{"gate": "H", "qubits": [0]}], [{"gate": "cnot", "qubits": [0, 1]}]]})
        )
        circuit = load_circuit(self.path, 3, layout=chain_layout(3))
        self.assertEqual(circuit.depth, 2)
        self.assertEqual(circuit.as_dict()["layers"][1], [{"gate": "CX", "qubits": [0, 1]}])

    def test_width_mismatch(self):
        """Test a circuit for another width is rejected."""
        self.path.write_text(json.dumps({"n": 2, "layers": []}))
        with self.assertRaises(CodeValidationError):
            load_circuit(self.path, 3)

    def test_malformed_file(self):
        """Test files without layers are rejected."""
        self.path.write_text(json.dumps({"n": 3}))
        with self.assertRaises(CodeValidationError):
            load_circuit(self.path, 3)
