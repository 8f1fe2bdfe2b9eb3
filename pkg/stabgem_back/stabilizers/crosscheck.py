"""
Batch comparison of stabilizer-engine quantities against the dense oracle.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import oracle
from .circuits import dress, random_circuit, simulate
from .codes import MixedStabilizerState, StabilizerState, chain_layout, zero_state
from .entanglement import rdm_zero_fidelity, stabilizer_overlap
from .exceptions import AlgebraError, InputError
from .pauli import PauliOperator
from .statistics import pauli_expectation

logger = logging.getLogger(__name__)

TOLERANCE = 1e-10
KINDS = ("expectation", "overlap", "reduced_fidelity")


@dataclass
class CrossCheckReport:
    samples: int
    max_deviation: float
    per_kind: dict[str, int] = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {
            "samples": self.samples,
            "max_deviation": self.max_deviation,
            "per_kind": dict(sorted(self.per_kind.items())),
            "failures": self.failures,
            "passed": self.passed,
        }


def random_clifford_state(n: int, depth: int, seed: int) -> tuple[StabilizerState, np.ndarray]:
    """U|0...0> for a seeded random circuit on a chain, as a group and as amplitudes."""
    circuit = random_circuit(chain_layout(n), depth, seed=seed)
    state = dress(zero_state(n), circuit)
    zero = np.zeros(2**n, dtype=complex)
    zero[0] = 1.0
    return state, simulate(circuit, zero)


def random_pauli(n: int, rng: np.random.Generator) -> PauliOperator:
    x = rng.integers(2, size=n)
    z = rng.integers(2, size=n)
    return PauliOperator(x, z, 2 * int(rng.integers(2)))


def _sample(kind: str, n: int, depth: int, seed: int) -> tuple[float, float]:
    rng = np.random.default_rng(seed)
    state, vec = random_clifford_state(n, depth, seed)
    if kind == "expectation":
        p = random_pauli(n, rng)
        return abs(pauli_expectation(state, p) - oracle.expectation(vec, p)), 0.0
    if kind == "overlap":
        other, other_vec = random_clifford_state(n, depth, seed + 1_000_003)
        exact = stabilizer_overlap(state, other)
        return abs(exact - abs(oracle.overlap(vec, other_vec)) ** 2), exact
    if kind == "reduced_fidelity":
        size = int(rng.integers(1, n + 1))
        region = sorted(rng.choice(n, size=size, replace=False).tolist())
        exact = rdm_zero_fidelity(state, region)
        dense = float(oracle.reduced_density(vec, region, n)[0, 0].real)
        return abs(exact - dense), exact
    raise InputError(f"unknown cross-check kind {kind!r}")


def crosscheck(samples: int = 500, n_max: int = 10, depth: int = 3, seed: int = 0) -> CrossCheckReport:
    """
    Compare `samples` random quantities on random Clifford states with
    2..n_max qubits, cycling through expectations, overlaps and reduced
    fidelities with |0_R>.
    """
    if n_max < 2:
        raise InputError(f"cross-checks need at least two qubits, got n_max={n_max}")
    counts: Counter[str] = Counter()
    failures = []
    worst = 0.0
    for index in range(samples):
        kind = KINDS[index % len(KINDS)]
        n = 2 + (index // len(KINDS)) % (n_max - 1)
        deviation, _ = _sample(kind, n, depth, seed + index)
        counts[kind] += 1
        worst = max(worst, deviation)
        if deviation > TOLERANCE:
            failures.append({"index": index, "kind": kind, "n": n, "deviation": deviation})
    report = CrossCheckReport(samples, worst, dict(counts), failures)
    logger.info("oracle cross-check: %d samples, max deviation %.3e", samples, worst)
    return report


def check_against_oracle(state: MixedStabilizerState, operators, seed: int = 0) -> float:
    """
    Largest deviation between stabilizer and dense expectations of `operators`.

    Raises:
        AlgebraError: when any deviation exceeds the tolerance.
    """
    dense = oracle.from_stabilizer(state, seed=seed)
    worst = 0.0
    for p in operators:
        worst = max(worst, abs(pauli_expectation(state, p) - oracle.expectation(dense, p)))
    if worst > TOLERANCE:
        raise AlgebraError(f"stabilizer and dense expectations differ by {worst:.3e}")
    return worst
