"""
Signed Pauli operators and the stabilizer group bookkeeping built on them.

An n-qubit operator is stored as two bit vectors and a phase exponent:

    P = i**phase * P(x_0, z_0) (x) ... (x) P(x_{n-1}, z_{n-1})

with P(0,0)=I, P(1,0)=X, P(0,1)=Z and P(1,1)=Y. With Y as its own symbol an
operator is Hermitian exactly when its phase exponent is even.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import gf2
from .exceptions import AlgebraError, InputError

logger = logging.getLogger(__name__)

_SIGN_TOKENS = {"+": 0, "+i": 1, "i": 1, "-": 2, "−": 2, "-i": 3, "−i": 3}
_SIGN_LABELS = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_LETTERS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def _bits(values, n: int | None = None) -> np.ndarray:
    arr = np.asarray(values, dtype=np.uint8).reshape(-1) & 1
    if n is not None and arr.shape[0] != n:
        raise InputError(f"expected {n} bits, got {arr.shape[0]}")
    return arr


class PauliOperator:
    """Immutable signed Pauli operator on n qubits."""

    __slots__ = ("x", "z", "phase")

    def __init__(self, x, z, phase: int = 0):
        x_bits = _bits(x)
        z_bits = _bits(z)
        if x_bits.shape != z_bits.shape:
            raise InputError(
                f"x and z parts differ in length ({x_bits.shape[0]} vs {z_bits.shape[0]})"
            )
        x_bits.setflags(write=False)
        z_bits.setflags(write=False)
        self.x = x_bits
        self.z = z_bits
        self.phase = int(phase) % 4

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> PauliOperator:
        return cls(np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8))

    @classmethod
    def from_label(cls, label: str) -> PauliOperator:
        """Parse text such as "XIZ", "-YY" or "+iZ"."""
        text = label.strip()
        phase = 0
        for token in ("+i", "-i", "−i", "i", "+", "-", "−"):
            if text.startswith(token):
                phase = _SIGN_TOKENS[token]
                text = text[len(token) :]
                break
        try:
            pairs = [_LETTERS[ch] for ch in text]
        except KeyError as exc:
            raise InputError(f"malformed Pauli string {label!r}") from exc
        if not pairs:
            raise InputError(f"empty Pauli string {label!r}")
        x, z = zip(*pairs)
        return cls(x, z, phase)

    @classmethod
    def from_terms(cls, n: int, terms: Mapping[int, str], phase: int = 0) -> PauliOperator:
        """Build an operator from a sparse {qubit: letter} map."""
        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        for qubit, letter in terms.items():
            if not 0 <= qubit < n:
                raise InputError(f"qubit {qubit} outside 0..{n - 1}")
            try:
                x[qubit], z[qubit] = _LETTERS[letter]
            except KeyError as exc:
                raise InputError(f"unknown Pauli letter {letter!r}") from exc
        return cls(x, z, phase)

    @classmethod
    def on_qubits(cls, n: int, qubits: Iterable[int], letter: str) -> PauliOperator:
        """The same letter on every listed qubit, e.g. a Z-string."""
        return cls.from_terms(n, {int(q): letter for q in qubits})

    @classmethod
    def from_symplectic(cls, vector: np.ndarray, phase: int = 0) -> PauliOperator:
        vec = _bits(vector)
        n = vec.shape[0] // 2
        return cls(vec[:n], vec[n:], phase)

    # ------------------------------------------------------------------
    # Properties
    # ------------------------------------------------------------------

    @property
    def n(self) -> int:
        return int(self.x.shape[0])

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.x | self.z)

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    @property
    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def sign(self) -> complex:
        return 1j**self.phase

    @property
    def symplectic(self) -> np.ndarray:
        return np.concatenate([self.x, self.z])

    @property
    def pauli_string(self) -> str:
        letters = np.array(["I", "X", "Z", "Y"])
        return "".join(letters[self.x + 2 * self.z])

    @property
    def label(self) -> str:
        return _SIGN_LABELS[self.phase] + self.pauli_string

    def letter(self, qubit: int) -> str:
        return "IXZY"[int(self.x[qubit]) + 2 * int(self.z[qubit])]

    # ------------------------------------------------------------------
    # Derived operators
    # ------------------------------------------------------------------

    def dagger(self) -> PauliOperator:
        return PauliOperator(self.x, self.z, -self.phase)

    def with_phase(self, phase: int) -> PauliOperator:
        return PauliOperator(self.x, self.z, phase)

    def restricted(self, qubits: Iterable[int]) -> PauliOperator:
        """Keep the tensor factors on `qubits`; the phase is kept as is."""
        mask = np.zeros(self.n, dtype=np.uint8)
        idx = np.fromiter((int(q) for q in qubits), dtype=np.int64)
        if idx.size:
            mask[idx] = 1
        return PauliOperator(self.x & mask, self.z & mask, self.phase)

    def permuted(self, image) -> PauliOperator:
        """The same letters moved from qubit q to qubit image[q]."""
        idx = np.asarray(image, dtype=np.int64)
        if idx.shape != (self.n,):
            raise InputError(f"a qubit image needs {self.n} entries, got {idx.size}")
        x = np.zeros_like(self.x)
        z = np.zeros_like(self.z)
        x[idx] = self.x
        z[idx] = self.z
        return PauliOperator(x, z, self.phase)

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return multiply(self, other)

    def __neg__(self) -> PauliOperator:
        return PauliOperator(self.x, self.z, self.phase + 2)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return (
            self.phase == other.phase
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def same_up_to_phase(self, other: PauliOperator) -> bool:
        return np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z)

    def __hash__(self) -> int:
        return hash((self.phase, self.x.tobytes(), self.z.tobytes()))

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        if self.n <= 32:
            return f"<PauliOperator {self.label}>"
        return f"<PauliOperator n={self.n} weight={self.weight} phase={self.phase}>"


def _check_lengths(p: PauliOperator, q: PauliOperator) -> None:
    if p.n != q.n:
        raise InputError(f"operators act on different qubit counts ({p.n} vs {q.n})")


def _phase_exponents(x1, z1, x2, z2) -> np.ndarray:
    """Per-qubit exponent of i picked up by P(x1,z1) P(x2,z2)."""
    x1 = x1.astype(np.int64)
    z1 = z1.astype(np.int64)
    x2 = x2.astype(np.int64)
    z2 = z2.astype(np.int64)
    return np.where(
        x1 & z1,
        z2 - x2,
        np.where(x1 == 1, z2 * (2 * x2 - 1), np.where(z1 == 1, x2 * (1 - 2 * z2), 0)),
    )


def multiply(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    """Exact product p*q including the phase."""
    _check_lengths(p, q)
    g = int(_phase_exponents(p.x, p.z, q.x, q.z).sum())
    return PauliOperator(p.x ^ q.x, p.z ^ q.z, p.phase + q.phase + g)


def product(operators: Iterable[PauliOperator], n: int | None = None) -> PauliOperator:
    """Left-to-right product; `n` is required for an empty sequence."""
    result: PauliOperator | None = None
    for op in operators:
        result = op if result is None else multiply(result, op)
    if result is None:
        if n is None:
            raise InputError("empty product needs an explicit qubit count")
        return PauliOperator.identity(n)
    return result


def symplectic_product(p: PauliOperator, q: PauliOperator) -> int:
    _check_lengths(p, q)
    return int((np.dot(p.x, q.z) + np.dot(p.z, q.x)) % 2)


def commutes(p: PauliOperator, q: PauliOperator) -> bool:
    """True iff the symplectic form of p and q vanishes."""
    return symplectic_product(p, q) == 0


def symplectic_matrix(operators: Sequence[PauliOperator], n: int | None = None) -> np.ndarray:
    """Stack operators into an (m, 2n) matrix of [x | z] rows."""
    if not operators:
        return np.zeros((0, 2 * (n or 0)), dtype=np.uint8)
    return np.vstack([op.symplectic for op in operators]).astype(np.uint8)


def anticommutation_vector(matrix: np.ndarray, p: PauliOperator) -> np.ndarray:
    """For each [x | z] row of `matrix`, 1 if it anticommutes with p."""
    n = p.n
    if matrix.shape[0] == 0:
        return np.zeros(0, dtype=np.uint8)
    xs = matrix[:, :n].astype(np.int64)
    zs = matrix[:, n:].astype(np.int64)
    return ((xs @ p.z.astype(np.int64) + zs @ p.x.astype(np.int64)) % 2).astype(np.uint8)


def region_ids(region) -> np.ndarray:
    """Qubit ids of a Region or of any iterable of ints, sorted."""
    qubits = getattr(region, "qubits", region)
    return np.array(sorted(int(q) for q in qubits), dtype=np.int64)


def _columns_for(qubits: np.ndarray, n: int) -> np.ndarray:
    return np.concatenate([qubits, qubits + n])


@dataclass(frozen=True)
class Decomposition:
    """Indices of basis rows whose ordered product, times i**phase, is the target."""

    indices: tuple[int, ...]
    phase: int

    @property
    def sign_matches(self) -> bool:
        return self.phase == 0


class GroupBasis:
    """
    Independent generating set of an abelian Pauli group.

    Rows must be GF(2)-independent in the symplectic representation; use
    `from_generators` to drop redundant generators from an arbitrary list.
    """

    def __init__(self, rows: Sequence[PauliOperator], n: int | None = None):
        rows = list(rows)
        if not rows and n is None:
            raise InputError("an empty basis needs an explicit qubit count")
        self.n = rows[0].n if rows else int(n)
        for row in rows:
            if row.n != self.n:
                raise InputError("basis rows act on different qubit counts")
        self.rows: tuple[PauliOperator, ...] = tuple(rows)

    @classmethod
    def from_generators(
        cls, generators: Sequence[PauliOperator], n: int | None = None
    ) -> GroupBasis:
        """Keep the lowest-index independent generators and check the rest.

        Raises AlgebraError when a dropped generator is only reproduced up
        to sign, which means the generated group contains -I.
        """
        generators = list(generators)
        matrix = symplectic_matrix(generators, n)
        keep = gf2.independent_rows(matrix)
        width = n if n is not None else (generators[0].n if generators else None)
        basis = cls([generators[i] for i in keep], n=width)
        kept = set(keep)
        for i, gen in enumerate(generators):
            if i in kept:
                continue
            decomposition = express_in_generators(basis, gen)
            if decomposition is None or not decomposition.sign_matches:
                raise AlgebraError(f"generator {i} contradicts the others: the group contains -I")
        if len(keep) < len(generators):
            logger.debug("dropped %d redundant generators", len(generators) - len(keep))
        return basis

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def is_pure(self) -> bool:
        return self.rank == self.n

    def __len__(self) -> int:
        return self.rank

    def __iter__(self) -> Iterator[PauliOperator]:
        return iter(self.rows)

    def __getitem__(self, index: int) -> PauliOperator:
        return self.rows[index]

    @cached_property
    def matrix(self) -> np.ndarray:
        return symplectic_matrix(self.rows, self.n)

    @cached_property
    def echelon(self) -> gf2.Echelon:
        return gf2.row_reduce(self.matrix, track=True)

    def combine(self, coefficients: np.ndarray) -> PauliOperator:
        """Ordered product of the rows selected by a 0/1 coefficient vector."""
        picked = np.flatnonzero(np.asarray(coefficients, dtype=np.uint8) & 1)
        return product((self.rows[i] for i in picked), n=self.n)

    def anticommuting(self, p: PauliOperator) -> np.ndarray:
        """Indices of rows that anticommute with p."""
        return np.flatnonzero(anticommutation_vector(self.matrix, p))

    def commutes_with(self, p: PauliOperator) -> bool:
        return self.anticommuting(p).size == 0

    def contains(self, p: PauliOperator) -> bool:
        """Sign-exact membership."""
        decomposition = express_in_generators(self, p)
        return decomposition is not None and decomposition.sign_matches

    def in_span(self, p: PauliOperator) -> bool:
        """Membership up to phase."""
        return express_in_generators(self, p) is not None

    def extended(self, extra: Iterable[PauliOperator]) -> GroupBasis:
        return GroupBasis.from_generators(list(self.rows) + list(extra), n=self.n)

    def __repr__(self) -> str:
        return f"<GroupBasis n={self.n} rank={self.rank}>"


def express_in_generators(basis: GroupBasis, s: PauliOperator) -> Decomposition | None:
    """
    Write s as a product of basis rows.

    Returns:
        Decomposition with s = i**phase * (ordered product of the rows), or
        None when s is not in the span even up to phase.
    """
    if s.n != basis.n:
        raise InputError(f"operator has {s.n} qubits, basis has {basis.n}")
    if basis.rank == 0:
        return Decomposition((), s.phase) if s.is_identity else None
    residual, coeffs = gf2.reduce_against(basis.echelon, s.symplectic)
    if residual.any():
        return None
    indices = tuple(int(i) for i in np.flatnonzero(coeffs))
    rebuilt = product((basis.rows[i] for i in indices), n=basis.n)
    return Decomposition(indices, (s.phase - rebuilt.phase) % 4)


def subgroup_supported_in(basis: GroupBasis, region) -> GroupBasis:
    """Basis of the group elements whose support lies inside `region`."""
    inside = region_ids(region)
    outside = np.setdiff1d(np.arange(basis.n), inside)
    if basis.rank == 0:
        return GroupBasis([], n=basis.n)
    if outside.size == 0:
        return basis
    restricted = basis.matrix[:, _columns_for(outside, basis.n)]
    combos = gf2.left_nullspace(restricted)
    rows = [basis.combine(c) for c in combos]
    return GroupBasis(rows, n=basis.n)


def supported_rank(basis: GroupBasis, region) -> int:
    """Dimension of the subgroup supported in `region`, without building it."""
    inside = region_ids(region)
    if basis.is_pure and 2 * inside.size <= basis.n:
        cols = _columns_for(inside, basis.n)
        return 2 * int(inside.size) - gf2.rank(basis.matrix[:, cols])
    outside = np.setdiff1d(np.arange(basis.n), inside)
    if outside.size == 0:
        return basis.rank
    return basis.rank - gf2.rank(basis.matrix[:, _columns_for(outside, basis.n)])
