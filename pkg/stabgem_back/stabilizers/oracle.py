"""
Dense state-vector and density-matrix oracle.

Amplitude index b = sum_j b_j 2**j: qubit 0 is the least significant bit.
Everything here is exponential in n and exists to cross-check the
stabilizer engine at small sizes.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.linalg import sqrtm

from . import conf
from .exceptions import CapabilityError, InputError
from .pauli import GroupBasis, PauliOperator, region_ids

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12

_SINGLE = {
    (0, 0): np.eye(2, dtype=complex),
    (1, 0): np.array([[0, 1], [1, 0]], dtype=complex),
    (0, 1): np.array([[1, 0], [0, -1]], dtype=complex),
    (1, 1): np.array([[0, -1j], [1j, 0]], dtype=complex),
}

GATE_MATRICES: dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "S": np.diag([1, 1j]).astype(complex),
    "SDG": np.diag([1, -1j]).astype(complex),
    "X": _SINGLE[(1, 0)],
    "Y": _SINGLE[(1, 1)],
    "Z": _SINGLE[(0, 1)],
    # two-qubit matrices use index 2*b_first + b_second
    "CX": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}

# Eigenstates of the single-qubit Paulis, rows: +Z, -Z, +X, -X, +Y, -Y
PAULI_EIGENSTATES = np.array(
    [
        [1, 0],
        [0, 1],
        [1 / np.sqrt(2), 1 / np.sqrt(2)],
        [1 / np.sqrt(2), -1 / np.sqrt(2)],
        [1 / np.sqrt(2), 1j / np.sqrt(2)],
        [1 / np.sqrt(2), -1j / np.sqrt(2)],
    ],
    dtype=complex,
)


def _check_pure_size(n: int) -> None:
    limit = int(conf.get("ORACLE_PURE_LIMIT"))
    if n > limit:
        raise CapabilityError(f"dense oracle handles pure states up to n={limit}, got n={n}")


def _check_mixed_size(n: int) -> None:
    limit = int(conf.get("ORACLE_MIXED_LIMIT"))
    if n > limit:
        raise CapabilityError(f"dense oracle handles density matrices up to n={limit}, got n={n}")


@dataclass
class DenseState:
    """Normalized amplitude vector of length 2**n."""

    amplitudes: np.ndarray
    n: int

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.amplitudes.shape[0] != 2**self.n:
            raise InputError(f"expected {2 ** self.n} amplitudes, got {self.amplitudes.shape[0]}")
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > 1e-9:
            raise InputError(f"state is not normalized (norm {norm:.12f})")

    @classmethod
    def basis(cls, n: int, index: int = 0) -> DenseState:
        _check_pure_size(n)
        amps = np.zeros(2**n, dtype=complex)
        amps[index] = 1.0
        return cls(amps, n)

    @classmethod
    def product(cls, single_states: Sequence[np.ndarray]) -> DenseState:
        """Tensor product with the first listed state on qubit 0."""
        vec = np.ones(1, dtype=complex)
        for s in single_states:
            vec = np.kron(np.asarray(s, dtype=complex), vec)
        vec = vec / np.linalg.norm(vec)
        return cls(vec, len(single_states))

    def density(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


def _masks(p: PauliOperator) -> tuple[int, int]:
    weights = 1 << np.arange(p.n, dtype=np.int64)
    return int((p.x.astype(np.int64) * weights).sum()), int((p.z.astype(np.int64) * weights).sum())


def _parity(values: np.ndarray, mask: int) -> np.ndarray:
    masked = values & mask
    parity = np.zeros(values.shape, dtype=np.int64)
    while mask:
        low = mask & -mask
        parity ^= (masked & low) != 0
        mask ^= low
    return parity


def _word_action(p: PauliOperator) -> tuple[np.ndarray, np.ndarray]:
    """Target index and coefficient of P|b> for every basis index b."""
    index = np.arange(2**p.n, dtype=np.int64)
    xmask, zmask = _masks(p)
    y_count = int(np.count_nonzero(p.x & p.z))
    coeff = (1j ** ((p.phase + y_count) % 4)) * (1 - 2 * _parity(index, zmask))
    return index ^ xmask, coeff


def apply_word(state: DenseState | np.ndarray, p: PauliOperator) -> np.ndarray:
    """P applied to an amplitude vector."""
    vec = state.amplitudes if isinstance(state, DenseState) else np.asarray(state, dtype=complex)
    if vec.shape[0] != 2**p.n:
        raise InputError("operator and state sizes differ")
    target, coeff = _word_action(p)
    out = np.zeros_like(vec)
    out[target] = coeff * vec
    return out


def pauli_matrix(p: PauliOperator) -> np.ndarray:
    """Dense 2**n x 2**n matrix of a signed Pauli operator."""
    _check_mixed_size(p.n)
    mat = np.ones((1, 1), dtype=complex)
    for j in range(p.n):
        mat = np.kron(_SINGLE[(int(p.x[j]), int(p.z[j]))], mat)
    return (1j**p.phase) * mat


def apply_unitary(vec: np.ndarray, unitary: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Apply a one- or two-qubit matrix to the listed qubits of an amplitude vector."""
    k = len(qubits)
    if unitary.shape != (2**k, 2**k):
        raise InputError(f"matrix of shape {unitary.shape} does not act on {k} qubits")
    tensor = np.asarray(vec, dtype=complex).reshape([2] * n)
    axes = [n - 1 - q for q in qubits]
    tensor = np.moveaxis(tensor, axes, list(range(k)))
    shape = tensor.shape
    tensor = (unitary @ tensor.reshape(2**k, -1)).reshape(shape)
    tensor = np.moveaxis(tensor, list(range(k)), axes)
    return tensor.reshape(-1)


def projector_apply(group: GroupBasis, vec: np.ndarray) -> np.ndarray:
    """Apply prod_g (I + g)/2 to a vector."""
    out = np.asarray(vec, dtype=complex)
    for g in group.rows:
        out = 0.5 * (out + apply_word(out, g))
    return out


def _fix_global_phase(vec: np.ndarray) -> np.ndarray:
    magnitudes = np.abs(vec)
    lead = int(np.flatnonzero(magnitudes > magnitudes.max() - 1e-9)[0])
    return vec * (abs(vec[lead]) / vec[lead])


def from_stabilizer(state, seed: int = 0) -> DenseState | np.ndarray:
    """
    Dense form of a stabilizer state.

    Pure states come back as a DenseState whose largest leading amplitude is
    real and positive; mixed states as the normalized density matrix.
    """
    group: GroupBasis = getattr(state, "group", state)
    n = group.n
    if group.is_pure:
        _check_pure_size(n)
        rng = np.random.default_rng(seed)
        for _ in range(8):
            start = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
            vec = projector_apply(group, start)
            norm = np.linalg.norm(vec)
            if norm > 1e-6:
                return DenseState(_fix_global_phase(vec / norm), n)
        raise InputError("stabilizer group has no common +1 eigenvector")
    _check_mixed_size(n)
    projector = np.eye(2**n, dtype=complex)
    for g in group.rows:
        projector = 0.5 * (projector + pauli_matrix(g) @ projector)
    trace = np.trace(projector).real
    if trace < 0.5:
        raise InputError("stabilizer group has no common +1 eigenspace")
    return projector / trace


def expectation(state, p: PauliOperator) -> complex:
    """<psi|P|psi> for a vector or Tr(rho P) for a density matrix."""
    if isinstance(state, DenseState) or np.ndim(state) == 1:
        vec = state.amplitudes if isinstance(state, DenseState) else np.asarray(state)
        return complex(np.vdot(vec, apply_word(vec, p)))
    rho = np.asarray(state)
    target, coeff = _word_action(p)
    index = np.arange(rho.shape[0])
    # Tr(rho P) = sum_b <b| rho P |b> = sum_b coeff(b) rho[b, target(b)]
    return complex(np.sum(coeff * rho[index, target]))


def overlap(a: DenseState | np.ndarray, b: DenseState | np.ndarray) -> complex:
    va = a.amplitudes if isinstance(a, DenseState) else np.asarray(a)
    vb = b.amplitudes if isinstance(b, DenseState) else np.asarray(b)
    return complex(np.vdot(va, vb))


def reduced_density(state, qubits, n: int | None = None) -> np.ndarray:
    """
    Partial trace onto `qubits`, kept in ascending order with the first one
    least significant.
    """
    keep = [int(q) for q in region_ids(qubits)]
    if isinstance(state, DenseState) or np.ndim(state) == 1:
        vec = state.amplitudes if isinstance(state, DenseState) else np.asarray(state)
        n = n or int(np.log2(vec.shape[0]))
        tensor = vec.reshape([2] * n)
        keep_axes = [n - 1 - q for q in reversed(keep)]
        rest = [a for a in range(n) if a not in keep_axes]
        mat = np.transpose(tensor, keep_axes + rest).reshape(2 ** len(keep), -1)
        return mat @ mat.conj().T
    rho = np.asarray(state)
    n = n or int(np.log2(rho.shape[0]))
    tensor = rho.reshape([2] * (2 * n))
    keep_axes = [n - 1 - q for q in reversed(keep)]
    rest = [a for a in range(n) if a not in keep_axes]
    perm = keep_axes + rest + [n + a for a in keep_axes] + [n + a for a in rest]
    dk = 2 ** len(keep)
    dr = 2 ** len(rest)
    blocks = np.transpose(tensor, perm).reshape(dk, dr, dk, dr)
    return np.einsum("arbr->ab", blocks)


def fidelity(rho, sigma) -> float:
    """Squared Uhlmann fidelity; for a pure argument this is <psi|other|psi>."""
    for pure, other in ((rho, sigma), (sigma, rho)):
        if isinstance(pure, DenseState) or np.ndim(pure) == 1:
            vec = pure.amplitudes if isinstance(pure, DenseState) else np.asarray(pure)
            if isinstance(other, DenseState) or np.ndim(other) == 1:
                return float(abs(overlap(vec, other)) ** 2)
            return float(np.real(np.vdot(vec, np.asarray(other) @ vec)))
    root = sqrtm(np.asarray(rho))
    inner = sqrtm(root @ np.asarray(sigma) @ root)
    return float(np.real(np.trace(inner)) ** 2)


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of rho - sigma."""
    a = rho.density() if isinstance(rho, DenseState) else np.asarray(rho)
    b = sigma.density() if isinstance(sigma, DenseState) else np.asarray(sigma)
    if np.ndim(a) == 1:
        a = np.outer(a, a.conj())
    if np.ndim(b) == 1:
        b = np.outer(b, b.conj())
    return float(0.5 * np.abs(np.linalg.eigvalsh(a - b)).sum())


def projector_expectation(group: GroupBasis, state) -> float:
    """<psi| Pi |psi> (or Tr(Pi rho)) for the projector onto the group's +1 space."""
    if isinstance(state, DenseState) or np.ndim(state) == 1:
        vec = state.amplitudes if isinstance(state, DenseState) else np.asarray(state)
        return float(np.real(np.vdot(vec, projector_apply(group, vec))))
    rho = np.asarray(state)
    projected = rho
    for g in group.rows:
        projected = 0.5 * (projected + pauli_matrix(g) @ projected)
    return float(np.real(np.trace(projected)))


def sequential_zero_probabilities(state, patches: Sequence) -> list[float]:
    """
    Conditional probabilities of finding each patch in |0...0>, in order,
    after postselecting all earlier patches on |0...0>.
    """
    vec = state.amplitudes if isinstance(state, DenseState) else np.asarray(state, dtype=complex)
    vec = vec.copy()
    index = np.arange(vec.shape[0], dtype=np.int64)
    probabilities = []
    for patch in patches:
        mask = int(sum(1 << int(q) for q in region_ids(patch)))
        before = float(np.vdot(vec, vec).real)
        vec[(index & mask) != 0] = 0.0
        after = float(np.vdot(vec, vec).real)
        if before <= 0:
            probabilities.append(0.0)
            continue
        probabilities.append(after / before)
    return probabilities


def max_pauli_product_overlap(state) -> float:
    """
    Largest |<P|psi>|**2 over the 6**n products of Pauli eigenstates,
    computed by contracting one qubit at a time.
    """
    vec = state.amplitudes if isinstance(state, DenseState) else np.asarray(state, dtype=complex)
    n = int(np.log2(vec.shape[0]))
    if n > 10:
        raise CapabilityError(f"the 6**n scan is limited to n <= 10, got n={n}")
    tensor = vec.reshape([2] * n)
    bras = PAULI_EIGENSTATES.conj()
    # contract the last axis (qubit 0) first; finished axes move to the back
    for _ in range(n):
        tensor = np.tensordot(tensor, bras, axes=([0], [1]))
    return float(np.max(np.abs(tensor) ** 2))


def czx_operator_apply(vec: np.ndarray, n: int) -> np.ndarray:
    """S_CZ S_X |psi> on a ring of n qubits."""
    index = np.arange(2**n, dtype=np.int64)
    flipped = vec[index ^ (2**n - 1)]
    bits = (index[:, None] >> np.arange(n)) & 1
    ring = (bits * np.roll(bits, -1, axis=1)).sum(axis=1)
    return (1 - 2 * (ring % 2)) * flipped


def czx_expectation(state, n: int) -> complex:
    """<psi| S_CZ S_X |psi>."""
    _check_pure_size(n)
    vec = state.amplitudes if isinstance(state, DenseState) else np.asarray(state, dtype=complex)
    if vec.shape[0] != 2**n:
        raise InputError(f"state has {vec.shape[0]} amplitudes, expected {2 ** n}")
    return complex(np.vdot(vec, czx_operator_apply(vec, n)))


def random_state(n: int, seed: int) -> DenseState:
    _check_pure_size(n)
    rng = np.random.default_rng(seed)
    vec = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return DenseState(vec / np.linalg.norm(vec), n)


def random_density(n: int, seed: int, rank: int = 2) -> np.ndarray:
    _check_mixed_size(n)
    rng = np.random.default_rng(seed)
    vecs = rng.normal(size=(2**n, rank)) + 1j * rng.normal(size=(2**n, rank))
    rho = vecs @ vecs.conj().T
    return rho / np.trace(rho).real
