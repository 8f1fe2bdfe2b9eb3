"""
Logical operators: distance search, correctability, cleaning onto meshes
and the anticommuting logical pairs used by the braiding constructions.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from . import conf, gf2
from .codes import StabilizerCode, StabilizerState, hermitian
from .exceptions import (
    AlgebraError,
    CapabilityError,
    CleaningFailure,
    NoLogicalOperatorsError,
)
from .geometry import MeshSpec, Region, build_mesh, gap_centers, intersection_squares
from .pauli import (
    GroupBasis,
    PauliOperator,
    multiply,
    region_ids,
    supported_rank,
    symplectic_product,
)

logger = logging.getLogger(__name__)


def _region_cols(ids: np.ndarray, n: int) -> np.ndarray:
    return np.concatenate([ids, ids + n])


def centralizer_dimension_in(code: StabilizerCode, region) -> int:
    """Dimension of the Pauli group (mod phases) on `region` commuting with every generator."""
    ids = region_ids(region)
    if ids.size == 0:
        return 0
    rows = code.touching(ids)
    if not rows:
        return 2 * int(ids.size)
    block = code.matrix[np.array(rows)][:, _region_cols(ids, code.n)]
    return 2 * int(ids.size) - gf2.rank(block)


def stabilizer_dimension_in(code: StabilizerCode, region) -> int:
    """Dimension of the stabilizer subgroup supported in `region`."""
    ids = region_ids(region)
    if ids.size == 0:
        return 0
    return supported_rank(code.basis, ids)


def is_correctable(code: StabilizerCode, region) -> bool:
    """True iff every centralizer element supported in `region` is a stabilizer."""
    return centralizer_dimension_in(code, region) == stabilizer_dimension_in(code, region)


def logical_in_region(code: StabilizerCode, region) -> PauliOperator | None:
    """A nontrivial logical operator supported in `region`, or None."""
    ids = region_ids(region)
    if ids.size == 0:
        return None
    n = code.n
    m = int(ids.size)
    rows = code.touching(ids)
    if rows:
        local = code.matrix[np.array(rows)][:, _region_cols(ids, n)]
        # (x_R | z_R) commutes with g iff g_x . z_R + g_z . x_R = 0
        candidates = gf2.nullspace(np.hstack([local[:, m:], local[:, :m]]))
    else:
        candidates = np.eye(2 * m, dtype=np.uint8)
    for vec in candidates:
        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        x[ids] = vec[:m]
        z[ids] = vec[m:]
        candidate = PauliOperator(x, z)
        if not code.basis.in_span(candidate):
            return candidate
    return None


def distance_bruteforce(code: StabilizerCode, max_weight: int | None = None) -> int | None:
    """
    Smallest weight of a logical operator.

    A logical of weight w exists exactly when some w-qubit region is not
    correctable, so the search scans regions by size. Exhaustive for
    n up to the configured limit; beyond it `max_weight` bounds the scan.
    """
    if code.k == 0:
        raise NoLogicalOperatorsError(f"{code.name} encodes no logical qubits")
    limit = int(conf.get("DISTANCE_EXHAUSTIVE_LIMIT"))
    if max_weight is None:
        if code.n > limit:
            raise CapabilityError(
                f"exhaustive distance search is limited to n <= {limit}; pass max_weight"
            )
        max_weight = code.n
    for weight in range(1, min(max_weight, code.n) + 1):
        for subset in itertools.combinations(range(code.n), weight):
            if not is_correctable(code, subset):
                logger.debug("found logical on %s", subset)
                return weight
    return None


def clean_logical(
    code: StabilizerCode, logical: PauliOperator, region, with_generators: bool = False
):
    """
    Multiply `logical` by a stabilizer so that it vanishes on `region`.

    Only generators touching the region take part. With `with_generators`
    the indices of the generators used are returned too.

    Raises:
        CleaningFailure: when no such stabilizer exists; the exception
            carries a logical supported in the region when there is one.
    """
    ids = region_ids(region)
    target = logical.symplectic[_region_cols(ids, code.n)] if ids.size else np.zeros(0)
    if ids.size == 0 or not target.any():
        return (logical, []) if with_generators else logical
    rows = code.touching(ids)
    block = code.matrix[np.array(rows)][:, _region_cols(ids, code.n)]
    coeffs = gf2.solve_rows(block, target)
    if coeffs is None:
        witness = logical_in_region(code, ids)
        raise CleaningFailure(
            f"cannot clean {logical!r} from a region of {ids.size} qubits", witness
        )
    used = [rows[i] for i in np.flatnonzero(coeffs)]
    result = logical
    for index in used:
        result = multiply(result, code.generators[index])
    if result.x[ids].any() or result.z[ids].any():
        raise AlgebraError("cleaned operator still touches the region")
    logger.debug("cleaned logical with %d generators", len(used))
    return (result, used) if with_generators else result


def _centralizer_vectors(code: StabilizerCode) -> np.ndarray:
    n = code.n
    m = code.matrix
    return gf2.nullspace(np.hstack([m[:, n:], m[:, :n]]))


def logical_pairs(code: StabilizerCode) -> list[tuple[PauliOperator, PauliOperator]]:
    """
    k anticommuting logical pairs, mutually commuting across pairs.

    Built-in families provide their pairs; otherwise the pairs come from
    symplectic Gram-Schmidt on the centralizer modulo the stabilizers,
    lowest-index pivots first.
    """
    if code.known_logicals is not None:
        return list(code.known_logicals)
    if code.k == 0:
        return []
    n = code.n
    stabilizers = code.basis.matrix
    centralizer = _centralizer_vectors(code)
    stacked = np.vstack([stabilizers, centralizer])
    offset = stabilizers.shape[0]
    keep = [i - offset for i in gf2.independent_rows(stacked) if i >= offset]
    vectors = [centralizer[i].copy() for i in keep]

    def symp(a: np.ndarray, b: np.ndarray) -> int:
        return int((np.dot(a[:n], b[n:]) + np.dot(a[n:], b[:n])) % 2)

    pairs: list[tuple[np.ndarray, np.ndarray]] = []
    while vectors:
        a = vectors.pop(0)
        partner = next((j for j, b in enumerate(vectors) if symp(a, b)), None)
        if partner is None:
            raise AlgebraError("logical operator commutes with every other logical")
        b = vectors.pop(partner)
        vectors = [
            (c ^ (symp(c, b) * a) ^ (symp(c, a) * b)).astype(np.uint8) for c in vectors
        ]
        pairs.append((a, b))
    if len(pairs) != code.k:
        raise AlgebraError(f"found {len(pairs)} logical pairs, expected k={code.k}")
    return [
        (PauliOperator.from_symplectic(a), PauliOperator.from_symplectic(b)) for a, b in pairs
    ]


def code_word(code: StabilizerCode, seed: int | None = None) -> StabilizerState:
    """
    A pure code state: the stabilizers plus one logical from each pair.

    With a seed, each pair contributes one of la, lb or i*la*lb with a random
    sign; without one it contributes +la.
    """
    rows = list(code.basis.rows)
    rng = np.random.default_rng(seed) if seed is not None else None
    for la, lb in logical_pairs(code):
        if rng is None:
            rows.append(la)
            continue
        choice = int(rng.integers(3))
        picked = (la, lb, hermitian(multiply(la, lb)))[choice]
        if rng.integers(2):
            picked = -picked
        rows.append(picked)
    label = f"{code.name}-word" if seed is None else f"{code.name}-word-{seed}"
    return StabilizerState(GroupBasis(rows, n=code.n), label)


def ground_state(code: StabilizerCode) -> StabilizerState:
    return code_word(code, seed=None)


@dataclass
class MeshLogicalReport:
    """Anticommuting logicals cleaned onto two meshes, with the square Q where they cross oddly."""

    l1: PauliOperator
    l2: PauliOperator
    mesh1: Region
    mesh2: Region
    intersection_squares: list[Region]
    Q: Region
    spec1: MeshSpec
    spec2: MeshSpec
    squares1: list[Region] = field(default_factory=list)
    squares2: list[Region] = field(default_factory=list)

    def odd_squares(self) -> list[Region]:
        return [q for q in self.intersection_squares if restricted_parity(self.l1, self.l2, q)]


def restricted_parity(p: PauliOperator, q: PauliOperator, region) -> int:
    """Symplectic product of the restrictions of p and q to `region`."""
    ids = region_ids(region)
    return symplectic_product(p.restricted(ids), q.restricted(ids))


def default_mesh_specs(code: StabilizerCode, t: int = 0) -> tuple[MeshSpec, MeshSpec]:
    """
    Square side floor(d/(4w)) and separation 2(w+t)+1, in coordinates, the
    second mesh shifted diagonally by one separation.
    """
    d = code.distance()
    if d is None:
        raise CapabilityError(f"{code.name} has no known distance; declare one")
    w = code.w
    d_len = d * code.layout.spacing
    size = max(1.0, float(np.floor(d_len / (4 * w))))
    separation = 2 * (w + t * code.layout.spacing) + 1
    spec1 = MeshSpec(size, separation)
    return spec1, spec1.shifted(separation, separation)


def clean_into_mesh(code: StabilizerCode, logical: PauliOperator, squares: Sequence[Region]):
    union = Region.of(itertools.chain.from_iterable(s.qubits for s in squares), "squares")
    return clean_logical(code, logical, union)


def _thin_axis(layout, operator: PauliOperator) -> tuple[int, float]:
    """Axis along which the support spreads least, with its mean coordinate there."""
    ids = operator.support
    ref = layout.positions[ids[0]]
    rel = layout.wrap(layout.positions[ids] - ref)
    axis = int(np.argmin(np.ptp(rel, axis=0)))
    return axis, float(ref[axis] + rel[:, axis].mean())


def mesh_representatives(
    code: StabilizerCode,
    logical: PauliOperator,
    spec: MeshSpec,
    squares: Sequence[Region],
    reach: int = 2,
) -> list[PauliOperator]:
    """
    Copies of `logical` on the mesh, one per gap strip where the code allows.

    The logical is moved across its thin axis by translations that map the
    stabilizer group to itself, aimed at the centre of each gap strip, and
    then cleaned off the squares. The plain cleaned logical comes first and
    copies with a support already seen are dropped.
    """
    layout = code.layout
    union = Region.of(itertools.chain.from_iterable(s.qubits for s in squares), "squares")
    found = [clean_logical(code, logical, union)]
    if logical.is_identity:
        return found
    seen = {found[0].support.tobytes()}
    axis, coord = _thin_axis(layout, logical)
    unit = layout.spacing
    for center in gap_centers(layout, spec, axis):
        delta = np.zeros(2)
        delta[axis] = center - coord
        wanted = float(layout.wrap(delta)[axis]) / unit
        steps = sorted(
            range(round(wanted) - reach, round(wanted) + reach + 1),
            key=lambda k: (abs(k - wanted), k),
        )
        for k in steps:
            shift = np.zeros(2)
            shift[axis] = k * unit
            image = code.translation(shift)
            if image is None:
                continue
            try:
                candidate = clean_logical(code, logical.permuted(image), union)
            except CleaningFailure:
                continue
            key = candidate.support.tobytes()
            if key not in seen:
                seen.add(key)
                found.append(candidate)
            break
    logger.debug(
        "%d mesh copies of a weight-%d logical across axis %d", len(found), logical.weight, axis
    )
    return found


def mesh_logicals(
    code: StabilizerCode,
    spec1: MeshSpec,
    spec2: MeshSpec,
    pair: tuple[PauliOperator, PauliOperator] | None = None,
) -> MeshLogicalReport:
    """
    Clean an anticommuting logical pair onto two meshes and locate Q.

    Raises:
        NoLogicalOperatorsError: when the code has k = 0.
        CleaningFailure: when a mesh's squares are not correctable.
        AlgebraError: when no intersection square carries odd parity.
    """
    if pair is None:
        pairs = logical_pairs(code)
        if not pairs:
            raise NoLogicalOperatorsError(f"{code.name} encodes no logical qubits")
        pair = pairs[0]
    squares1, mesh1 = build_mesh(code.layout, spec1)
    squares2, mesh2 = build_mesh(code.layout, spec2)
    l1 = clean_into_mesh(code, pair[0], squares1)
    l2 = clean_into_mesh(code, pair[1], squares2)
    if symplectic_product(l1, l2) != 1:
        raise AlgebraError("cleaned logicals no longer anticommute")
    pieces = intersection_squares(code.layout, spec1, spec2)
    odd = [q for q in pieces if restricted_parity(l1, l2, q)]
    if len(odd) % 2 != 1:
        raise AlgebraError(
            f"{len(odd)} intersection squares carry odd parity; the logicals anticommute"
        )
    report = MeshLogicalReport(
        l1, l2, mesh1, mesh2, pieces, odd[0], spec1, spec2, squares1, squares2
    )
    logger.info(
        "mesh logicals on %s: %d intersection squares, Q=%s (%d qubits)",
        code.name,
        len(pieces),
        odd[0].label,
        len(odd[0]),
    )
    return report
