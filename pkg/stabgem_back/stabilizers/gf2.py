"""
GF(2) linear algebra on bit-packed rows.

Matrices are passed around as uint8 arrays of 0/1 with shape (rows, cols).
Elimination packs each row with numpy.packbits so that one XOR updates eight
columns at once. Pivots are chosen column by column, taking the lowest-index
available row, so every basis produced here is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def as_bits(matrix: np.ndarray) -> np.ndarray:
    """Coerce an array-like to a 2D uint8 array of 0/1 entries."""
    bits = np.asarray(matrix, dtype=np.uint8) & 1
    if bits.ndim == 1:
        bits = bits.reshape(1, -1)
    return bits


def _pack(bits: np.ndarray) -> np.ndarray:
    return np.packbits(bits, axis=1)


def _unpack(packed: np.ndarray, cols: int) -> np.ndarray:
    return np.unpackbits(packed, axis=1, count=cols)


def _column(packed: np.ndarray, col: int) -> np.ndarray:
    return (packed[:, col >> 3] >> (7 - (col & 7))) & 1


@dataclass(frozen=True)
class Echelon:
    """Result of a row reduction.

    `rref` holds the reduced rows (nonzero rows first), `pivots` the pivot
    column of each nonzero row, and `transform`, when tracked, the matrix T
    with T @ original = rref over GF(2).
    """

    rref: np.ndarray
    pivots: tuple[int, ...]
    transform: np.ndarray | None = None

    @property
    def rank(self) -> int:
        return len(self.pivots)


def row_reduce(matrix: np.ndarray, track: bool = False, full: bool = True) -> Echelon:
    """
    Gauss-Jordan elimination over GF(2).

    Args:
        matrix: 0/1 array of shape (rows, cols).
        track: Also record the row operations as a transform matrix.
        full: Clear pivot columns above the pivot too (reduced form). With
            False only the rows below are cleared, which is enough for rank.

    Returns:
        Echelon with the reduced matrix, pivot columns and optional transform.
    """
    bits = as_bits(matrix)
    rows, cols = bits.shape
    packed = _pack(bits)
    transform = _pack(np.eye(rows, dtype=np.uint8)) if track else None
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.flatnonzero(_column(packed[r:], c))
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            packed[[r, p]] = packed[[p, r]]
            if transform is not None:
                transform[[r, p]] = transform[[p, r]]
        mask = _column(packed, c).astype(bool)
        mask[r] = False
        if not full:
            mask[:r] = False
        if mask.any():
            packed[mask] ^= packed[r]
            if transform is not None:
                transform[mask] ^= transform[r]
        pivots.append(c)
        r += 1
    return Echelon(
        rref=_unpack(packed, cols),
        pivots=tuple(pivots),
        transform=_unpack(transform, rows) if transform is not None else None,
    )


def rank(matrix: np.ndarray) -> int:
    """Rank over GF(2)."""
    bits = as_bits(matrix)
    if bits.size == 0:
        return 0
    # Eliminate along the shorter side
    if bits.shape[1] > bits.shape[0]:
        bits = bits.T
    return row_reduce(bits, full=False).rank


def nullspace(matrix: np.ndarray) -> np.ndarray:
    """Basis of {v : M v = 0}, one vector per row."""
    bits = as_bits(matrix)
    cols = bits.shape[1]
    ech = row_reduce(bits)
    pivot_set = set(ech.pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for row, pc in enumerate(ech.pivots):
            basis[i, pc] = ech.rref[row, f]
    return basis


def left_nullspace(matrix: np.ndarray) -> np.ndarray:
    """Basis of {a : a M = 0}, one vector per row."""
    bits = as_bits(matrix)
    ech = row_reduce(bits, track=True)
    return ech.transform[ech.rank :].copy()


def reduce_against(ech: Echelon, target: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Reduce a row vector against a tracked echelon form.

    Returns:
        (residual, coefficients) where coefficients @ original equals
        target + residual. A zero residual means target is in the row span.
    """
    if ech.transform is None:
        raise ValueError("echelon form was computed without a transform")
    residual = np.asarray(target, dtype=np.uint8).copy() & 1
    coeffs = np.zeros(ech.transform.shape[1], dtype=np.uint8)
    for row, pc in enumerate(ech.pivots):
        if residual[pc]:
            residual ^= ech.rref[row]
            coeffs ^= ech.transform[row]
    return residual, coeffs


def solve_rows(matrix: np.ndarray, target: np.ndarray) -> np.ndarray | None:
    """Find a with a M = target, or None when target is outside the row span."""
    ech = row_reduce(matrix, track=True)
    residual, coeffs = reduce_against(ech, target)
    if residual.any():
        return None
    return coeffs


def solve_linear(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray | None:
    """Find v with M v = rhs, or None when the system is inconsistent."""
    return solve_rows(as_bits(matrix).T, rhs)


def independent_rows(matrix: np.ndarray) -> list[int]:
    """Indices of a maximal independent set of rows, greedy from the top."""
    bits = as_bits(matrix)
    if bits.shape[0] == 0:
        return []
    return list(row_reduce(bits.T, full=False).pivots)
