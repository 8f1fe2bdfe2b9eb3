"""
Exact expectation values of Pauli words on stabilizer states, and the
braiding and exchange phases built from them.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

from .codes import MixedStabilizerState, StabilizerCode
from .exceptions import AlgebraError, InputError
from .pauli import PauliOperator, express_in_generators, product, symplectic_product

logger = logging.getLogger(__name__)


def pauli_expectation(state: MixedStabilizerState, p: PauliOperator) -> complex:
    """
    Tr(rho p) for rho proportional to the group projector.

    The value is +1, -1, +i, -i or 0: nonzero only when p is, up to a phase,
    an element of the group.
    """
    group = state.group
    if p.n != group.n:
        raise InputError(f"operator has {p.n} qubits, state has {group.n}")
    if not group.commutes_with(p):
        return 0j
    decomposition = express_in_generators(group, p)
    if decomposition is None:
        return 0j
    return complex(1j**decomposition.phase)


def braiding_phase(
    state: MixedStabilizerState, gamma_open: PauliOperator, gamma_loop: PauliOperator
) -> complex:
    """<gamma_open^dagger gamma_loop gamma_open>, checked against the commutation parity."""
    word = product([gamma_open.dagger(), gamma_loop, gamma_open])
    value = pauli_expectation(state, word)
    parity = -1 if symplectic_product(gamma_open, gamma_loop) else 1
    expected = parity * pauli_expectation(state, gamma_loop)
    if abs(value - expected) > 1e-12:
        raise AlgebraError(
            f"braiding word gives {value}, commutation parity predicts {expected}"
        )
    return value


def exchange_word(m1: PauliOperator, m2: PauliOperator, m3: PauliOperator) -> PauliOperator:
    """M3^dagger M2^dagger M1^dagger M3 M2 M1, multiplied left to right."""
    return product([m3.dagger(), m2.dagger(), m1.dagger(), m3, m2, m1])


def exchange_phase(state: MixedStabilizerState, triple) -> complex:
    """
    Exchange phase of a hopping triple.

    The operator product is evaluated directly and compared with the sign
    predicted by the three pairwise commutation parities.
    """
    m1, m2, m3 = triple.m1, triple.m2, triple.m3
    value = pauli_expectation(state, exchange_word(m1, m2, m3))
    parity = (
        symplectic_product(m1, m2) + symplectic_product(m1, m3) + symplectic_product(m2, m3)
    ) % 2
    predicted = -1 if parity else 1
    if abs(value - predicted) > 1e-12:
        raise AlgebraError(f"exchange word gives {value}, parity algebra gives {predicted}")
    return value


@dataclass(frozen=True)
class SymmetryCheck:
    symmetric: bool
    violations: tuple[int, ...]
    expectations: tuple[complex, ...]

    def __bool__(self) -> bool:
        return self.symmetric


def verify_one_form_symmetry(state: MixedStabilizerState, code: StabilizerCode) -> SymmetryCheck:
    """Every code generator must have expectation +1 on the state."""
    values = tuple(pauli_expectation(state, g) for g in code.generators)
    violations = tuple(i for i, v in enumerate(values) if abs(v - 1) > 1e-12)
    if violations:
        logger.debug("%d of %d generators violated", len(violations), len(values))
    return SymmetryCheck(not violations, violations, values)


def expectation_scan(
    state: MixedStabilizerState, operators: Sequence[PauliOperator]
) -> list[complex]:
    return [pauli_expectation(state, p) for p in operators]


def czx_expectation(state, n: int) -> complex:
    """<S_CZ S_X> on a ring of n qubits, via the dense oracle."""
    from . import oracle

    if isinstance(state, MixedStabilizerState):
        state = oracle.from_stabilizer(state)
    return oracle.czx_expectation(state, n)

