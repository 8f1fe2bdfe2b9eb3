"""
Clifford circuits and exact Pauli conjugation.

A circuit is a list of layers applied first to last, so the circuit unitary
is U = L_t ... L_1. `conjugate` returns U P U^dagger, which maps the
stabilizers of |psi> to those of U|psi>.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import conf
from .codes import MixedStabilizerState, StabilizerCode, StabilizerState, dressed_code
from .exceptions import CodeValidationError, InputError, UnsupportedGateError
from .geometry import LatticeLayout
from .pauli import GroupBasis, PauliOperator

logger = logging.getLogger(__name__)

SINGLE_QUBIT_GATES = ("H", "S", "SDG", "X", "Y", "Z")
TWO_QUBIT_GATES = ("CX", "CZ", "SWAP")
GATE_ALIASES = {"SDAG": "SDG", "S†": "SDG", "CNOT": "CX"}


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]

    @classmethod
    def parse(cls, name: str, qubits: Iterable[int]) -> Gate:
        key = GATE_ALIASES.get(name.upper(), name.upper())
        qubits = tuple(int(q) for q in qubits)
        if key in SINGLE_QUBIT_GATES:
            arity = 1
        elif key in TWO_QUBIT_GATES:
            arity = 2
        else:
            raise UnsupportedGateError(
                f"gate {name!r} is not in the exact Clifford set "
                f"{SINGLE_QUBIT_GATES + TWO_QUBIT_GATES}; use the dense oracle for it"
            )
        if len(qubits) != arity:
            raise InputError(f"gate {key} acts on {arity} qubit(s), got {list(qubits)}")
        if arity == 2 and qubits[0] == qubits[1]:
            raise InputError(f"gate {key} needs two distinct qubits, got {list(qubits)}")
        return cls(key, qubits)

    def as_dict(self) -> dict:
        return {"gate": self.name, "qubits": list(self.qubits)}


class CliffordCircuit:
    """
    Layers of one- and two-qubit Clifford gates.

    Gates inside a layer act on disjoint qubits. When a layout is given,
    two-qubit gates must join qubits at most `locality_radius` apart.
    """

    def __init__(
        self,
        n: int,
        layers: Sequence[Sequence[Gate]] = (),
        layout: LatticeLayout | None = None,
        locality_radius: float | None = None,
    ):
        self.n = int(n)
        self.layers: tuple[tuple[Gate, ...], ...] = tuple(tuple(layer) for layer in layers)
        self.locality_radius = (
            float(locality_radius)
            if locality_radius is not None
            else float(conf.get("LOCALITY_RADIUS"))
        )
        self._validate(layout)

    def _validate(self, layout: LatticeLayout | None) -> None:
        for depth, layer in enumerate(self.layers):
            used: set[int] = set()
            for gate in layer:
                for q in gate.qubits:
                    if not 0 <= q < self.n:
                        raise InputError(f"layer {depth}: qubit {q} outside 0..{self.n - 1}")
                    if q in used:
                        raise InputError(f"layer {depth}: qubit {q} is used by two gates")
                    used.add(q)
                if layout is not None and len(gate.qubits) == 2:
                    dist = layout.distance(*gate.qubits)
                    if dist > self.locality_radius + 1e-9:
                        raise InputError(
                            f"layer {depth}: {gate.name}{list(gate.qubits)} spans {dist:.3f}, "
                            f"beyond the locality radius {self.locality_radius}"
                        )

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def entangling_depth(self) -> int:
        """Number of layers holding at least one two-qubit gate."""
        return sum(1 for layer in self.layers if any(len(g.qubits) == 2 for g in layer))

    @property
    def gates(self) -> list[Gate]:
        return [gate for layer in self.layers for gate in layer]

    def conjugate(self, p: PauliOperator) -> PauliOperator:
        """U p U^dagger."""
        if p.n != self.n:
            raise InputError(f"operator has {p.n} qubits, circuit has {self.n}")
        x, z, phase = conjugate_arrays(self, p.x[None, :], p.z[None, :], np.array([p.phase]))
        return PauliOperator(x[0], z[0], int(phase[0]))

    def conjugate_all(self, operators: Sequence[PauliOperator]) -> list[PauliOperator]:
        if not operators:
            return []
        x = np.vstack([op.x for op in operators])
        z = np.vstack([op.z for op in operators])
        phase = np.array([op.phase for op in operators], dtype=np.int64)
        x, z, phase = conjugate_arrays(self, x, z, phase)
        return [PauliOperator(x[i], z[i], int(phase[i])) for i in range(len(operators))]

    def inverse(self) -> CliffordCircuit:
        inverse_name = {"S": "SDG", "SDG": "S"}
        layers = [
            [Gate(inverse_name.get(g.name, g.name), g.qubits) for g in layer]
            for layer in reversed(self.layers)
        ]
        return CliffordCircuit(self.n, layers, locality_radius=self.locality_radius)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "layers": [[g.as_dict() for g in layer] for layer in self.layers],
        }

    def __repr__(self) -> str:
        return f"<CliffordCircuit n={self.n} depth={self.depth}>"


def conjugate_arrays(circuit: CliffordCircuit, x, z, phase):
    """Conjugate a batch of operators given as (m, n) bit arrays and phases."""
    x = np.array(x, dtype=np.uint8)
    z = np.array(z, dtype=np.uint8)
    phase = np.array(phase, dtype=np.int64) % 4
    for layer in circuit.layers:
        for gate in layer:
            _apply_gate(gate, x, z, phase)
    return x, z, phase % 4


def _apply_gate(gate: Gate, x: np.ndarray, z: np.ndarray, phase: np.ndarray) -> None:
    """In-place update of the columns touched by one gate; Y is (1, 1)."""
    name = gate.name
    if len(gate.qubits) == 1:
        (q,) = gate.qubits
        xq, zq = x[:, q].copy(), z[:, q].copy()
        if name == "H":
            phase += 2 * (xq & zq)
            x[:, q], z[:, q] = zq, xq
        elif name == "S":
            phase += 2 * (xq & zq)
            z[:, q] = zq ^ xq
        elif name == "SDG":
            phase += 2 * (xq & (zq ^ 1))
            z[:, q] = zq ^ xq
        elif name == "X":
            phase += 2 * zq
        elif name == "Y":
            phase += 2 * (xq ^ zq)
        elif name == "Z":
            phase += 2 * xq
        return
    a, b = gate.qubits
    xa, za, xb, zb = x[:, a].copy(), z[:, a].copy(), x[:, b].copy(), z[:, b].copy()
    if name == "CX":
        phase += 2 * (xa & zb & (xb ^ za ^ 1))
        x[:, b] = xb ^ xa
        z[:, a] = za ^ zb
    elif name == "CZ":
        phase += 2 * (xa & xb & (za ^ zb))
        z[:, a] = za ^ xb
        z[:, b] = zb ^ xa
    elif name == "SWAP":
        x[:, a], x[:, b] = xb, xa
        z[:, a], z[:, b] = zb, za


# ----------------------------------------------------------------------
# Builders
# ----------------------------------------------------------------------


def neighbour_pairs(layout: LatticeLayout, radius: float) -> list[tuple[int, int]]:
    """Qubit pairs at most `radius` apart, sorted."""
    pairs = []
    for a in range(layout.n):
        dist = layout.distances_from(layout.positions[a])
        for b in np.flatnonzero(dist <= radius + 1e-9):
            if b > a:
                pairs.append((a, int(b)))
    return pairs


def _matchings(pairs: list[tuple[int, int]]) -> list[list[tuple[int, int]]]:
    """Greedy edge colouring: each colour class is a set of disjoint pairs."""
    classes: list[list[tuple[int, int]]] = []
    busy: list[set[int]] = []
    for a, b in pairs:
        for cls, used in zip(classes, busy):
            if a not in used and b not in used:
                cls.append((a, b))
                used.update((a, b))
                break
        else:
            classes.append([(a, b)])
            busy.append({a, b})
    return classes


def brick_layers(
    layout: LatticeLayout, depth: int, radius: float | None = None
) -> list[list[tuple[int, int]]]:
    """Neighbour pairs of each brick layer: layer l is colour class l of the neighbour graph."""
    radius = float(conf.get("LOCALITY_RADIUS")) if radius is None else radius
    classes = _matchings(neighbour_pairs(layout, radius))
    if not classes:
        return [[] for _ in range(depth)]
    return [list(classes[level % len(classes)]) for level in range(depth)]


def brick_wall(
    layout: LatticeLayout,
    depth: int,
    seed: int = 0,
    radius: float | None = None,
    two_qubit_gates: Sequence[str] = TWO_QUBIT_GATES,
) -> CliffordCircuit:
    """
    Brick-wall circuit: layer l uses colour class l of the neighbour graph,
    with seeded two-qubit gates on every pair and seeded single-qubit gates
    on the qubits left idle.
    """
    radius = float(conf.get("LOCALITY_RADIUS")) if radius is None else radius
    rng = np.random.default_rng(seed)
    layers = []
    for pairs in brick_layers(layout, depth, radius):
        layer: list[Gate] = []
        used: set[int] = set()
        for a, b in pairs:
            name = two_qubit_gates[int(rng.integers(len(two_qubit_gates)))]
            if rng.integers(2):
                a, b = b, a
            layer.append(Gate(name, (a, b)))
            used.update((a, b))
        for q in range(layout.n):
            if q not in used:
                layer.append(Gate(SINGLE_QUBIT_GATES[int(rng.integers(6))], (q,)))
        layers.append(layer)
    circuit = CliffordCircuit(layout.n, layers, layout=layout, locality_radius=radius)
    logger.debug("brick wall depth=%d seed=%d on %d qubits", depth, seed, layout.n)
    return circuit


def random_circuit(
    layout: LatticeLayout, depth: int, seed: int = 0, radius: float | None = None
) -> CliffordCircuit:
    """Each layer is a random maximal matching of neighbours plus single-qubit gates."""
    radius = float(conf.get("LOCALITY_RADIUS")) if radius is None else radius
    rng = np.random.default_rng(seed)
    pairs = neighbour_pairs(layout, radius)
    layers = []
    for _ in range(depth):
        layer: list[Gate] = []
        used: set[int] = set()
        for index in rng.permutation(len(pairs)):
            a, b = pairs[int(index)]
            if a in used or b in used or rng.random() < 0.3:
                continue
            layer.append(Gate(TWO_QUBIT_GATES[int(rng.integers(3))], (a, b)))
            used.update((a, b))
        for q in range(layout.n):
            if q not in used and rng.random() < 0.7:
                layer.append(Gate(SINGLE_QUBIT_GATES[int(rng.integers(6))], (q,)))
        layers.append(layer)
    return CliffordCircuit(layout.n, layers, layout=layout, locality_radius=radius)


def relabeling_circuit(n: int, seed: int = 0) -> CliffordCircuit:
    """One layer of seeded single-qubit Cliffords: entangling depth zero."""
    rng = np.random.default_rng(seed)
    layer = [Gate(SINGLE_QUBIT_GATES[int(rng.integers(6))], (q,)) for q in range(n)]
    return CliffordCircuit(n, [layer])


def circuit_from_data(data: dict, n: int, layout: LatticeLayout | None, radius: float | None):
    if data.get("n") is not None and int(data["n"]) != n:
        raise CodeValidationError(f"circuit is for {data['n']} qubits, code has {n}")
    layers = [[Gate.parse(g["gate"], g["qubits"]) for g in layer] for layer in data["layers"]]
    return CliffordCircuit(n, layers, layout=layout, locality_radius=radius)


def load_circuit(
    path: str | Path,
    n: int,
    layout: LatticeLayout | None = None,
    locality_radius: float | None = None,
) -> CliffordCircuit:
    """Read a JSON circuit file and check it against the layout."""
    from .serializers import CircuitFileSerializer

    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read circuit file {path}: {exc}") from exc
    serializer = CircuitFileSerializer(data=raw)
    if not serializer.is_valid():
        raise CodeValidationError(f"invalid circuit file {path}", serializer.errors)
    circuit = circuit_from_data(serializer.validated_data, n, layout, locality_radius)
    logger.info("loaded %s from %s", circuit, path)
    return circuit


# ----------------------------------------------------------------------
# Dressing
# ----------------------------------------------------------------------


def dress(obj, circuit: CliffordCircuit):
    """
    Conjugate an operator, a code or a stabilizer state by the circuit.

    Codes keep their layout; their known logical pairs are dressed too.
    """
    if isinstance(obj, PauliOperator):
        return circuit.conjugate(obj)
    if isinstance(obj, StabilizerCode):
        generators = circuit.conjugate_all(list(obj.generators))
        logicals = None
        if obj.known_logicals is not None:
            flat = circuit.conjugate_all([p for pair in obj.known_logicals for p in pair])
            logicals = list(zip(flat[0::2], flat[1::2]))
        return dressed_code(obj, generators, logicals, f"dressed-t{circuit.depth}")
    if isinstance(obj, MixedStabilizerState):
        rows = circuit.conjugate_all(list(obj.group.rows))
        group = GroupBasis(rows, n=obj.n)
        label = f"{obj.label}-dressed" if obj.label else "dressed"
        if isinstance(obj, StabilizerState):
            return StabilizerState(group, label)
        return MixedStabilizerState(group, label)
    raise InputError(f"cannot dress a {type(obj).__name__}")


def spread(layout: LatticeLayout, before: PauliOperator, after: PauliOperator) -> float:
    """How far the dressed support reaches beyond the original support."""
    if after.is_identity:
        return 0.0
    if before.is_identity:
        return float("inf")
    return float(layout.distance_to_region(before.support)[after.support].max())


def simulate(circuit: CliffordCircuit, vec: np.ndarray) -> np.ndarray:
    """Dense U|vec> with the oracle's gate matrices."""
    from .oracle import GATE_MATRICES, apply_unitary

    out = np.asarray(vec, dtype=complex)
    for layer in circuit.layers:
        for gate in layer:
            out = apply_unitary(out, GATE_MATRICES[gate.name], gate.qubits, circuit.n)
    return out
