"""
Entanglement quantities of stabilizer states and the certificates that
bound the depth-t geometric entanglement from below.

Exact quantities work on the stabilizer group alone:

    Tr(Pi_S sigma) = 2**(dim C - rank S)   when the signs of S and of
                                            sigma agree on C, else 0

where C is the group of Pauli operators that appear (up to sign) in both S
and the stabilizer group of sigma. Overlaps with product states, reduced
fidelities with |0_R> and syndrome statistics are all special cases.

The two ascent routines are dense and only run where the oracle does.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property, partial

import numpy as np
from scipy.stats import unitary_group

from . import conf, gf2
from .circuits import CliffordCircuit, brick_layers, dress
from .codes import (
    MixedStabilizerState,
    StabilizerCode,
    chain_layout,
    product_state,
)
from .exceptions import (
    AlgebraError,
    CapabilityError,
    CertificateFailure,
    ConstructionError,
    FeasibilityError,
    InputError,
    NoLogicalOperatorsError,
    PreconditionError,
)
from .geometry import (
    LatticeLayout,
    MeshSpec,
    Region,
    build_mesh,
    connected_components,
    intersection_squares,
    partition_into_patches,
    region_distance,
)
from .logicals import (
    MeshLogicalReport,
    code_word,
    ground_state,
    logical_pairs,
    mesh_representatives,
    restricted_parity,
)
from .pauli import (
    GroupBasis,
    PauliOperator,
    commutes,
    express_in_generators,
    product,
    region_ids,
    supported_rank,
)
from .statistics import braiding_phase, exchange_phase, verify_one_form_symmetry
from .strings import (
    BraidingTriple,
    ExchangeTriple,
    build_braiding_triple,
    check_mesh_feasible,
    patch_braiding_witness,
    patch_exchange_witness,
)

logger = logging.getLogger(__name__)


# ----------------------------------------------------------------------
# Group overlaps
# ----------------------------------------------------------------------


def _group_of(state) -> GroupBasis:
    group = getattr(state, "group", state)
    if not isinstance(group, GroupBasis):
        raise CapabilityError(
            f"expected a stabilizer state, got {type(state).__name__}; use the dense oracle"
        )
    return group


def common_subgroup(a: GroupBasis, b: GroupBasis) -> tuple[int, bool]:
    """
    Dimension of the Pauli group shared by a and b (up to sign), and whether
    the two groups assign every shared element the same sign.
    """
    if a.n != b.n:
        raise InputError(f"groups act on {a.n} and {b.n} qubits")
    if a.rank == 0 or b.rank == 0:
        return 0, True
    combos = gf2.left_nullspace(np.vstack([a.matrix, b.matrix]))
    for combo in combos:
        left = a.combine(combo[: a.rank])
        right = b.combine(combo[a.rank :])
        if left.phase != right.phase:
            return int(combos.shape[0]), False
    return int(combos.shape[0]), True


def projector_overlap(group: GroupBasis, sigma) -> float:
    """Tr(Pi sigma), Pi the projector onto the +1 space of `group`."""
    dim, agree = common_subgroup(group, _group_of(sigma))
    if not agree:
        return 0.0
    return 2.0 ** (dim - group.rank)


def stabilizer_fidelity(a: MixedStabilizerState, b: MixedStabilizerState) -> float:
    """<psi|rho|psi> where at least one argument is pure."""
    if a.is_pure:
        return projector_overlap(a.group, b)
    if b.is_pure:
        return projector_overlap(b.group, a)
    raise CapabilityError("fidelity between two mixed stabilizer states is not implemented")


def stabilizer_overlap(a: MixedStabilizerState, b: MixedStabilizerState) -> float:
    """|<a|b>|**2 for two pure stabilizer states."""
    if not (a.is_pure and b.is_pure):
        raise InputError("stabilizer_overlap needs two pure states")
    return projector_overlap(a.group, b)


def rdm_zero_fidelity(state, region) -> float:
    """
    <0_R| rho_R |0_R>.

    Only group elements that are Z-type and supported in R contribute, each
    with its sign; the signs form a character, so the sum is either the size
    of that subgroup or zero.
    """
    group = _group_of(state)
    ids = region_ids(region)
    if ids.size == 0:
        return 1.0
    if group.rank == 0:
        return 2.0 ** (-int(ids.size))
    n = group.n
    outside = np.setdiff1d(np.arange(n), ids)
    # x everywhere and z outside R must vanish
    cols = np.concatenate([np.arange(n), outside + n])
    combos = gf2.left_nullspace(group.matrix[:, cols])
    for combo in combos:
        if group.combine(combo).phase != 0:
            return 0.0
    return 2.0 ** (int(combos.shape[0]) - int(ids.size))


def _check_disjoint(patches: Sequence[Region]) -> np.ndarray:
    seen: set[int] = set()
    for patch in patches:
        members = set(int(q) for q in region_ids(patch))
        if members & seen:
            raise InputError(
                f"patch {getattr(patch, 'label', '?')} overlaps an earlier patch "
                f"at {sorted(members & seen)[:5]}"
            )
        seen |= members
    return np.array(sorted(seen), dtype=np.int64)


def decoupling_check(state, patches: Sequence[Region]) -> bool:
    """True iff the reduced state on the union of the patches is their tensor product."""
    union = _check_disjoint(patches)
    if len(patches) <= 1:
        return True
    group = _group_of(state)
    joint = supported_rank(group, union)
    separate = sum(supported_rank(group, p) for p in patches)
    if joint != separate:
        logger.debug("decoupling fails: joint rank %d, sum of patch ranks %d", joint, separate)
    return joint == separate


# ----------------------------------------------------------------------
# Product-state overlaps
# ----------------------------------------------------------------------

_LETTER_ORDER = ("Z", "X", "Y")


@dataclass(frozen=True)
class PauliProductWitness:
    """Best product of Pauli eigenstates, e.g. labels ("+Z", "-X", ...)."""

    labels: tuple[str, ...]
    overlap: float

    @property
    def bits(self) -> float:
        return -math.log2(self.overlap) if self.overlap > 0 else math.inf

    def state(self) -> MixedStabilizerState:
        return product_state(list(self.labels))


def _column_ints(matrix: np.ndarray) -> list[int]:
    """Each column of a 0/1 matrix as a Python int bitmask over the rows."""
    packed = np.packbits(np.ascontiguousarray(matrix.T), axis=1)
    return [int.from_bytes(row.tobytes(), "big") for row in packed]


def _insert(basis: list[int], col: int) -> list[int] | None:
    """Reduce col against a descending XOR basis; None when it is dependent."""
    for b in basis:
        col = min(col, col ^ b)
    if not col:
        return None
    return sorted(basis + [col], reverse=True)


def _letter_signs(group: GroupBasis, letters: Sequence[str]) -> list[str]:
    """Eigenvalue signs for which every shared group element has matching sign."""
    n = group.n
    unsigned = [PauliOperator.from_terms(n, {q: letter}) for q, letter in enumerate(letters)]
    singles = np.vstack([p.symplectic for p in unsigned])
    combos = gf2.left_nullspace(np.vstack([group.matrix, singles]))
    signs = np.zeros(n, dtype=np.uint8)
    if combos.shape[0]:
        rows = combos[:, group.rank :]
        rhs = np.array([group.combine(c[: group.rank]).phase // 2 for c in combos], dtype=np.uint8)
        solution = gf2.solve_linear(rows, rhs)
        if solution is None:
            raise AlgebraError("no sign assignment matches the group on the shared elements")
        signs = solution
    return [("-" if s else "+") + letter for s, letter in zip(signs.tolist(), letters)]


def best_pauli_product(state) -> PauliProductWitness:
    """
    Product of single-qubit Pauli eigenstates with the largest overlap.

    For fixed letters the signs can always be matched, and the overlap is
    2**(dim C - n) with dim C = rank - rank(G K), K picking per qubit the
    column that must vanish for a group element to act as I or the letter
    there. The search is a depth-first scan over 3**n letter choices that
    stops a branch once its rank cannot beat the best found.
    """
    group = _group_of(state)
    n = group.n
    limit = int(conf.get("E0_BRUTEFORCE_LIMIT"))
    if n > limit:
        raise CapabilityError(
            f"exhaustive product search is limited to n <= {limit}; use e0_alternating_ascent"
        )
    cols = _column_ints(group.matrix)
    options = [
        {"Z": cols[q], "X": cols[n + q], "Y": cols[q] ^ cols[n + q]} for q in range(n)
    ]
    best_rank = group.rank + 1
    best_letters: list[str] = []

    def search(q: int, basis: list[int], letters: list[str]) -> None:
        nonlocal best_rank, best_letters
        if len(basis) >= best_rank:
            return
        if q == n:
            best_rank = len(basis)
            best_letters = list(letters)
            return
        for letter in _LETTER_ORDER:
            extended = _insert(basis, options[q][letter])
            letters.append(letter)
            search(q + 1, basis if extended is None else extended, letters)
            letters.pop()

    search(0, [], [])
    overlap = 2.0 ** (group.rank - best_rank - n)
    labels = tuple(_letter_signs(group, best_letters))
    check = projector_overlap(product_state(list(labels)).group, state)
    if abs(check - overlap) > 1e-12:
        raise AlgebraError(f"witness overlap {check} differs from the search value {overlap}")
    logger.debug("best Pauli product %s with overlap %s", "".join(labels), overlap)
    return PauliProductWitness(labels, overlap)


def e0_product_pauli_bruteforce(state) -> float:
    """-log2 of the best overlap with a product of Pauli eigenstates."""
    return best_pauli_product(state).bits


# ----------------------------------------------------------------------
# Dense ascents
# ----------------------------------------------------------------------


def _dense_vector(state_dense) -> np.ndarray:
    from .oracle import DenseState, _check_pure_size

    if isinstance(state_dense, MixedStabilizerState):
        raise InputError("the ascent works on dense states; convert with oracle.from_stabilizer")
    vec = state_dense.amplitudes if isinstance(state_dense, DenseState) else np.asarray(
        state_dense, dtype=complex
    ).reshape(-1)
    n = int(round(math.log2(vec.shape[0]))) if vec.size else 0
    if vec.size == 0 or 2**n != vec.shape[0]:
        raise InputError(f"a state vector needs 2**n amplitudes, got {vec.shape[0]}")
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > 1e-9:
        raise InputError(f"state is not normalized (norm {norm:.12f})")
    _check_pure_size(n)
    return vec


@dataclass
class AscentResult:
    """Best overlap found by an ascent, with its witness."""

    overlap: float
    seed: int
    sweeps: int
    history: list[float] = field(default_factory=list)
    witness: object = None

    @property
    def bits(self) -> float:
        return -math.log2(self.overlap) if self.overlap > 0 else math.inf


def _see_saw(vec: np.ndarray, n: int, seed: int, iters: int, tol: float) -> AscentResult:
    rng = np.random.default_rng(seed)
    sites = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
    sites /= np.linalg.norm(sites, axis=1, keepdims=True)
    tensor = vec.reshape([2] * n)
    history: list[float] = []
    value = 0.0
    sweeps = 0
    for sweeps in range(1, iters + 1):
        for q in range(n):
            local = _site_environment(tensor, sites, q)
            norm = float(np.linalg.norm(local))
            if norm == 0.0:
                continue
            sites[q] = local / norm
            value = norm**2
        history.append(value)
        if len(history) > 1 and history[-1] - history[-2] <= tol:
            break
    return AscentResult(value, seed, sweeps, history, sites.copy())


def _site_environment(tensor: np.ndarray, sites: np.ndarray, q: int) -> np.ndarray:
    """Contract every site except q; qubit p sits on axis n - 1 - p."""
    n = tensor.ndim
    out = tensor
    for p in range(n):
        if p == q:
            continue
        # removing higher axes first leaves the lower axis numbers unchanged
        out = np.tensordot(out, sites[p].conj(), axes=([n - 1 - p], [0]))
    return out


def _best_of(results: Sequence[AscentResult]) -> AscentResult:
    """Largest overlap; ties go to the lowest seed."""
    return min(results, key=lambda r: (-round(r.overlap, 12), r.seed))


def e0_alternating_ascent(
    state_dense,
    restarts: int = 8,
    iters: int = 200,
    tol: float = 1e-13,
    seed: int = 0,
    jobs: int | None = None,
) -> AscentResult:
    """
    See-saw maximization of |<phi_1 ... phi_n|psi>|**2 over product states.

    Each update replaces one site by its normalized environment vector, so
    the overlap never decreases within a restart. Restarts use seeds
    seed, seed+1, ... and run on a thread pool.
    """
    vec = _dense_vector(state_dense)
    n = int(round(math.log2(vec.shape[0])))
    if restarts < 1:
        raise InputError("at least one restart is needed")
    run = partial(_see_saw, vec, n, iters=iters, tol=tol)
    with ThreadPoolExecutor(max_workers=conf.jobs(jobs)) as pool:
        results = list(pool.map(run, [seed + r for r in range(restarts)]))
    best = _best_of(results)
    logger.info(
        "product ascent over %d restarts: overlap %.12f (seed %d, %d sweeps)",
        restarts,
        best.overlap,
        best.seed,
        best.sweeps,
    )
    return best


@dataclass
class DenseCircuit:
    """Gates as (qubits, unitary) in application order: U = g_last ... g_first."""

    n: int
    gates: list[tuple[tuple[int, ...], np.ndarray]]
    depth: int

    def apply(self, vec: np.ndarray) -> np.ndarray:
        from .oracle import apply_unitary

        out = np.asarray(vec, dtype=complex)
        for qubits, unitary in self.gates:
            out = apply_unitary(out, unitary, qubits, self.n)
        return out

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "depth": self.depth,
            "gates": [
                {
                    "qubits": list(qubits),
                    "real": np.round(unitary.real, 12).tolist(),
                    "imag": np.round(unitary.imag, 12).tolist(),
                }
                for qubits, unitary in self.gates
            ],
        }


def _split(vec: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Amplitudes as a (2**k, rest) matrix, row index 2*b_first + b_second."""
    tensor = vec.reshape([2] * n)
    axes = [n - 1 - q for q in qubits]
    tensor = np.moveaxis(tensor, axes, list(range(len(qubits))))
    return tensor.reshape(2 ** len(qubits), -1)


def _circuit_sweeps(vec, n, layers, seed, sweeps, tol) -> AscentResult:
    from .oracle import apply_unitary

    rng = np.random.default_rng(seed)
    gates: list[tuple[tuple[int, ...], np.ndarray]] = [
        ((q,), unitary_group.rvs(2, random_state=rng)) for q in range(n)
    ]
    for pairs in layers:
        gates.extend(((a, b), unitary_group.rvs(4, random_state=rng)) for a, b in pairs)
    zero = np.zeros(2**n, dtype=complex)
    zero[0] = 1.0
    history: list[float] = []
    value = 0.0
    done = 0
    for done in range(1, sweeps + 1):
        # chi_k = (gates after k)^dagger |psi>
        chis = [None] * len(gates)
        chi = vec.copy()
        for k in range(len(gates) - 1, -1, -1):
            chis[k] = chi
            qubits, unitary = gates[k]
            chi = apply_unitary(chi, unitary.conj().T, qubits, n)
        phi = zero
        for k, (qubits, _) in enumerate(gates):
            env = _split(phi, qubits, n) @ _split(chis[k], qubits, n).conj().T
            left, singular, right_h = np.linalg.svd(env)
            best = right_h.conj().T @ left.conj().T
            gates[k] = (qubits, best)
            value = float(singular.sum()) ** 2
            phi = apply_unitary(phi, best, qubits, n)
        history.append(value)
        if len(history) > 1 and history[-1] - history[-2] <= tol:
            break
    return AscentResult(value, seed, done, history, DenseCircuit(n, gates, len(layers)))


def et_upper_via_circuit_ascent(
    state_dense,
    t: int,
    seed: int = 0,
    sweeps: int = 100,
    restarts: int = 4,
    tol: float = 1e-13,
    jobs: int | None = None,
    layout: LatticeLayout | None = None,
) -> AscentResult:
    """
    Upper bound on E_t from brick-wall circuits of depth t on `layout`.

    The ansatz is a layer of single-qubit unitaries followed by t brick
    layers of two-qubit unitaries on neighbouring qubits of the layout (the
    qubit chain when no layout is given), so every candidate is a
    geometrically local depth-t circuit. Each gate in turn is replaced by the
    unitary maximizing |<psi|U|0...0>| with the rest fixed: for the
    environment E = phi chi^dagger with SVD W S V^dagger this is V W^dagger.
    """
    if t < 0:
        raise InputError(f"depth must be nonnegative, got {t}")
    vec = _dense_vector(state_dense)
    n = int(round(math.log2(vec.shape[0])))
    if layout is None:
        layout = chain_layout(n)
    elif layout.n != n:
        raise InputError(f"layout has {layout.n} qubits, the state {n}")
    run = partial(_circuit_sweeps, vec, n, brick_layers(layout, t), sweeps=sweeps, tol=tol)
    with ThreadPoolExecutor(max_workers=conf.jobs(jobs)) as pool:
        results = list(pool.map(run, [seed + r for r in range(restarts)]))
    best = _best_of(results)
    logger.info("circuit ascent t=%d: overlap %.12f (seed %d)", t, best.overlap, best.seed)
    return best


# ----------------------------------------------------------------------
# Certificates
# ----------------------------------------------------------------------


def certificate_bound(m: int, epsilon_prime: float) -> float:
    """-m log2(1 - epsilon')."""
    if not 0.0 < epsilon_prime < 1.0:
        raise InputError(f"epsilon' must lie in (0, 1), got {epsilon_prime}")
    if m < 0:
        raise InputError(f"patch count must be nonnegative, got {m}")
    return m * -math.log2(1.0 - epsilon_prime)


@dataclass
class GemCertificate:
    """Lower bound on the depth-t geometric entanglement and the witnesses behind it."""

    kind: str
    t: int
    patches: list[Region]
    per_patch_witness: list[BraidingTriple | ExchangeTriple]
    epsilon: float | None
    epsilon_prime: float
    m: int
    bound_bits: float
    alpha_effective: float
    provenance: dict = field(default_factory=dict)


def _check_separation(layout, patches: Sequence[Region], gap: float) -> None:
    for index, patch in enumerate(patches):
        dist = layout.distance_to_region(patch)
        for other in patches[index + 1 :]:
            closest = float(dist[np.array(other.qubits, dtype=np.int64)].min())
            if closest <= gap:
                raise CertificateFailure(
                    f"patches {patch.label} and {other.label} are only {closest:.3f} apart",
                    patch=other.label,
                )


def patch_certificate_toric(
    code_like: StabilizerCode,
    t: int = 0,
    circuit: CliffordCircuit | None = None,
    jobs: int | None = None,
    seed: int | None = None,
) -> GemCertificate:
    """
    Patch certificate: square patches of side 8(t+1) spaced 2(t+1) apart,
    one verified braiding witness in each, and an exact check that the code
    state restricted to the patches is their tensor product.

    Both lengths are layout coordinates. The toric layout has bonds of
    length 2 and one qubit per unit along each axis, so the side counts
    8(t+1) qubit pitches (4(t+1) bonds) and the packing holds at least
    n/(100(t+1)**2) patches.

    With a circuit, the code and its logicals are dressed first; the
    circuit's entangling depth may not exceed t.

    Raises:
        CertificateFailure: no patch fits, or a patch has no verified witness.
    """
    if not isinstance(code_like, StabilizerCode):
        raise InputError(f"expected a StabilizerCode, got {type(code_like).__name__}")
    if t < 0:
        raise InputError(f"depth must be nonnegative, got {t}")
    code = code_like
    if circuit is not None:
        if circuit.entangling_depth > t:
            raise InputError(
                f"circuit has entangling depth {circuit.entangling_depth}, more than t={t}"
            )
        code = dress(code_like, circuit)
    size = 8.0 * (t + 1)
    gap = 2.0 * (t + 1)
    patches = partition_into_patches(code.layout, size, gap)
    if not patches:
        raise CertificateFailure(
            f"no patch of side {size:g} fits the layout of {code.name}", patch=None
        )
    _check_separation(code.layout, patches, gap)
    with ThreadPoolExecutor(max_workers=conf.jobs(jobs)) as pool:
        witnesses = list(pool.map(partial(patch_braiding_witness, code), patches))
    state = code_word(code, seed)
    if not decoupling_check(state, patches):
        raise CertificateFailure("the code state does not factorize over the patches", patch=None)
    epsilon_prime = float(conf.get("EPSILON_PRIME"))
    m = len(patches)
    bound = certificate_bound(m, epsilon_prime)
    certificate = GemCertificate(
        kind="patch",
        t=t,
        patches=patches,
        per_patch_witness=witnesses,
        epsilon=2.0 * math.sqrt(epsilon_prime),
        epsilon_prime=epsilon_prime,
        m=m,
        bound_bits=bound,
        alpha_effective=bound / code.n,
        provenance={
            "code": code.name,
            "family": code.family,
            "n": code.n,
            "patch_size": size,
            "gap": gap,
            "epsilon_prime_source": "patch side 8(t+1), epsilon' = epsilon**2 / 4",
            "circuit_depth": circuit.depth if circuit is not None else None,
            "seed": seed,
        },
    )
    logger.info(
        "patch certificate for %s, t=%d: m=%d, bound %.6f bits, alpha %.3e",
        code.name,
        t,
        m,
        bound,
        certificate.alpha_effective,
    )
    return certificate


@dataclass
class _CleanedMesh:
    spec: MeshSpec
    squares: list[Region]
    mesh: Region
    first: list[PauliOperator]
    second: list[PauliOperator]


def _prepare_mesh(code: StabilizerCode, pair, index: int, spec: MeshSpec) -> _CleanedMesh:
    squares = check_mesh_feasible(code, spec, f"mesh{index}")
    _, mesh = build_mesh(code.layout, spec)
    return _CleanedMesh(
        spec,
        squares,
        mesh,
        mesh_representatives(code, pair[0], spec, squares),
        mesh_representatives(code, pair[1], spec, squares),
    )


def theorem2_certificate(code: StabilizerCode, t: int = 0, jobs: int | None = None) -> GemCertificate:
    """
    Mesh certificate from diagonally shifted meshes.

    Squares have side floor(d/(4w)) and separation 2(w + t) + 1 (lengths in
    layout coordinates, d scaled by the lattice spacing); the family shifts
    one mesh diagonally by one separation at a time. Each mesh carries a copy
    of both logicals of the first pair in every gap strip the code's
    translations reach, so every ordered pair of meshes crosses at many
    distinct places. Each odd crossing block gives a braiding triple, and
    the triples kept are pairwise more than 2(t+1) lattice spacings apart.

    Raises:
        FeasibilityError: the constants leave no room for correctable squares.
        CertificateFailure: no crossing produced a verified triple.
    """
    if t < 0:
        raise InputError(f"depth must be nonnegative, got {t}")
    d = code.distance()
    if d is None:
        raise CapabilityError(f"{code.name} has no known distance; declare one")
    if code.k == 0:
        raise NoLogicalOperatorsError(f"{code.name} encodes no logical qubits")
    layout = code.layout
    w = code.w
    spacing = layout.spacing
    d_len = d * spacing
    reach = w + t * spacing
    size = math.floor(d_len / (4 * w))
    separation = 2 * reach + 1
    threshold = float(conf.get("THEOREM2_THRESHOLD"))
    if size < 1:
        raise FeasibilityError(
            f"square side floor(d/(4w)) = floor({d_len:g}/{4 * w:.3f}) is zero",
            constraint="square_size>=1",
        )
    if d_len <= threshold * reach**2:
        raise FeasibilityError(
            f"d = {d_len:g} does not exceed {threshold:g}*(w+t)**2 = {threshold * reach**2:.3f}",
            constraint="d>d0",
        )
    period = float(layout.extent.min())
    specs = [
        MeshSpec(size, separation, (j * separation, j * separation))
        for j in range(max(1, math.ceil(period / separation)))
        if j * separation < period
    ]
    pair = logical_pairs(code)[0]
    with ThreadPoolExecutor(max_workers=conf.jobs(jobs)) as pool:
        meshes = list(
            pool.map(lambda item: _prepare_mesh(code, pair, *item), list(enumerate(specs)))
        )
    state = ground_state(code)
    min_gap = 2 * (t + 1) * spacing
    kept_blocks: list[Region] = []
    witnesses: list[BraidingTriple] = []
    skipped = 0
    candidates: list[tuple[Region, MeshLogicalReport, dict]] = []
    seen_blocks: set[tuple[int, ...]] = set()
    for i, first in enumerate(meshes):
        for j, second in enumerate(meshes):
            if i == j:
                continue
            pieces = intersection_squares(layout, first.spec, second.spec)
            for a, l1 in enumerate(first.first):
                for b, l2 in enumerate(second.second):
                    if commutes(l1, l2):
                        continue
                    shared = set(l1.support.tolist()) & set(l2.support.tolist())
                    for piece in pieces:
                        overlap = Region.of(shared.intersection(piece.qubits))
                        if not overlap.qubits or not restricted_parity(l1, l2, piece):
                            continue
                        for block in connected_components(layout, overlap, w):
                            if block.qubits in seen_blocks or not restricted_parity(l1, l2, block):
                                continue
                            seen_blocks.add(block.qubits)
                            report = MeshLogicalReport(
                                l1, l2, first.mesh, second.mesh, pieces, piece,
                                first.spec, second.spec, first.squares, second.squares,
                            )
                            candidates.append((block, report, {"meshes": [i, j], "copies": [a, b]}))

    def attempt(candidate) -> BraidingTriple | None:
        block, report, tags = candidate
        try:
            triple = build_braiding_triple(code, report, block=block, prechecked=True)
        except (ConstructionError, FeasibilityError) as exc:
            logger.debug("crossing on meshes %s skipped: %s", tags["meshes"], exc)
            return None
        phase = braiding_phase(state, triple.gamma2, triple.gamma1)
        if phase != -1:
            raise AlgebraError(f"verified triple has braiding phase {phase}")
        triple.provenance.update(tags)
        return triple

    def separated(block: Region, others: Sequence[Region]) -> bool:
        return all(region_distance(layout, block, other) > min_gap for other in others)

    # greedy in candidate order; a crossing blocked only by a failed build is retried
    pending = candidates
    with ThreadPoolExecutor(max_workers=conf.jobs(jobs)) as pool:
        while pending:
            batch: list = []
            for candidate in pending:
                if separated(candidate[0], kept_blocks + [c[0] for c in batch]):
                    batch.append(candidate)
            for candidate, triple in zip(batch, pool.map(attempt, batch)):
                if triple is None:
                    skipped += 1
                    continue
                kept_blocks.append(candidate[0])
                witnesses.append(triple)
            tried = {id(c) for c in batch}
            pending = [
                c for c in pending if id(c) not in tried and separated(c[0], kept_blocks)
            ]
    if not witnesses:
        raise CertificateFailure(f"no crossing of {code.name} produced a verified triple")
    epsilon_prime = float(conf.get("EPSILON_PRIME"))
    m = len(witnesses)
    bound = certificate_bound(m, epsilon_prime)
    target = d_len**2 / (w**2 * reach**2)
    certificate = GemCertificate(
        kind="theorem2",
        t=t,
        patches=[Region(b.qubits, f"X{k}") for k, b in enumerate(kept_blocks)],
        per_patch_witness=witnesses,
        epsilon=2.0 * math.sqrt(epsilon_prime),
        epsilon_prime=epsilon_prime,
        m=m,
        bound_bits=bound,
        alpha_effective=bound / target,
        provenance={
            "code": code.name,
            "family": code.family,
            "n": code.n,
            "d": d,
            "distance_provenance": code.distance_provenance,
            "w": w,
            "square_size": size,
            "separation": separation,
            "meshes": len(specs),
            "target_ratio": target,
            "achieved_over_target": m / target,
            "skipped_blocks": skipped,
        },
    )
    logger.info(
        "mesh certificate for %s, t=%d: %d verified crossings of %d meshes, bound %.6f bits",
        code.name,
        t,
        m,
        len(specs),
        bound,
    )
    return certificate


# ----------------------------------------------------------------------
# Sequential projection
# ----------------------------------------------------------------------


@dataclass
class ProjectionBound:
    """prod_j F_j from postselecting patches on |0...0> in row-major order."""

    value: float
    factors: list[float]
    patches: list[Region]
    step_probabilities: list[list[float]]
    epsilon_prime: float
    gap_checked: bool
    witnesses: list[ExchangeTriple] = field(default_factory=list)
    phases: list[complex] = field(default_factory=list)

    @property
    def bits(self) -> float:
        return -math.log2(self.value) if self.value > 0 else math.inf


def postselect_zero(rows: list[PauliOperator], n: int, qubit: int) -> tuple[float, list[PauliOperator]]:
    """
    Probability of Z_qubit = +1 and the stabilizer rows after keeping that outcome.
    """
    z = PauliOperator.from_terms(n, {qubit: "Z"})
    group = GroupBasis(rows, n=n)
    anti = group.anticommuting(z)
    if anti.size:
        pivot = rows[int(anti[0])]
        updated = list(rows)
        for index in anti[1:]:
            updated[int(index)] = product([rows[int(index)], pivot])
        updated[int(anti[0])] = z
        return 0.5, updated
    decomposition = express_in_generators(group, z)
    if decomposition is None:
        return 0.5, list(rows) + [z]
    return (1.0 if decomposition.phase == 0 else 0.0), list(rows)


def _row_major(patches: Sequence[Region]) -> list[Region]:
    if all(getattr(p, "bounds", None) is not None for p in patches):
        return sorted(patches, key=lambda p: (p.bounds[1], p.bounds[0]))
    return list(patches)


def sequential_projection_bound(
    state,
    patches: Sequence[Region],
    witnesses: Sequence[ExchangeTriple] | None = None,
    code: StabilizerCode | None = None,
) -> ProjectionBound:
    """
    Exact prod_j F_j, F_j the probability of |0...0> on patch j after the
    earlier patches were postselected on |0...0>.

    Z measurements are applied one qubit at a time with their exact
    probabilities. With a code, patches without witnesses get the canonical
    junction, every witness must verify, and on states symmetric under a
    honeycomb code each F_j must stay below 1 - epsilon'.

    Raises:
        CapabilityError: the state is not a stabilizer state.
        CertificateFailure: a witness fails or a symmetric patch reaches 1 - epsilon'.
    """
    group = _group_of(state)
    _check_disjoint(patches)
    ordered = _row_major(patches)
    if witnesses is None and code is not None:
        witnesses = [patch_exchange_witness(code, p) for p in ordered]
    witnesses = list(witnesses or [])
    if witnesses and len(witnesses) != len(ordered):
        raise InputError(f"{len(witnesses)} witnesses for {len(ordered)} patches")
    phases: list[complex] = []
    for patch, witness in zip(ordered, witnesses):
        if witness.junction not in patch:
            raise InputError(f"junction {witness.junction} lies outside {patch.label}")
        if code is not None:
            try:
                witness.verify(code)
            except ConstructionError as exc:
                raise CertificateFailure(f"{patch.label}: {exc}", patch=patch.label) from exc
        phases.append(exchange_phase(MixedStabilizerState(group), witness))
    symmetric = (
        code is not None
        and code.family == "honeycomb"
        and bool(verify_one_form_symmetry(MixedStabilizerState(group), code))
    )
    epsilon_prime = float(conf.get("EPSILON_PRIME"))
    rows = list(group.rows)
    n = group.n
    factors: list[float] = []
    steps: list[list[float]] = []
    total = 1.0
    for patch in ordered:
        probabilities = []
        factor = 1.0
        for q in region_ids(patch):
            p, rows = postselect_zero(rows, n, int(q))
            probabilities.append(p)
            factor *= p
            if factor == 0.0:
                break
        factors.append(factor)
        steps.append(probabilities)
        total *= factor
        logger.debug("patch %s: F=%s", patch.label, factor)
        if factor == 0.0:
            break
        if symmetric and factor >= 1.0 - epsilon_prime:
            raise CertificateFailure(
                f"F={factor} on {patch.label} is not below 1 - {epsilon_prime}", patch=patch.label
            )
    result = ProjectionBound(
        total, factors, ordered, steps, epsilon_prime, symmetric, witnesses, phases
    )
    logger.info("sequential projection over %d patches: %.6e", len(ordered), total)
    return result


# ----------------------------------------------------------------------
# Syndrome statistics
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class SyndromeDistribution:
    """
    Outcome distribution of measuring every code generator on a stabilizer
    state: uniform over the solutions b of constraints @ b = rhs, where
    b_i = 1 stands for outcome -1 of generator i.
    """

    m: int
    constraints: np.ndarray
    rhs: np.ndarray

    @property
    def dimension(self) -> int:
        return self.m - int(self.constraints.shape[0])

    @property
    def all_plus_mass(self) -> float:
        if self.rhs.any():
            return 0.0
        return 2.0 ** (-self.dimension)

    def probability(self, outcomes: Sequence[int]) -> float:
        """P(outcomes), one +1/-1 value per generator."""
        values = np.asarray(outcomes, dtype=np.int64)
        if values.shape != (self.m,) or not np.isin(values, (1, -1)).all():
            raise InputError(f"expected {self.m} outcomes of +1 or -1")
        bits = (values == -1).astype(np.uint8)
        if self.constraints.shape[0] and ((self.constraints @ bits) % 2 != self.rhs).any():
            return 0.0
        return 2.0 ** (-self.dimension)

    @cached_property
    def support(self) -> dict[str, float]:
        """Pattern of '+'/'-' per generator mapped to its probability."""
        if self.dimension > 20:
            raise CapabilityError(f"support has 2**{self.dimension} patterns; query probability()")
        if self.constraints.shape[0]:
            base = gf2.solve_linear(self.constraints, self.rhs)
            if base is None:
                raise AlgebraError("syndrome constraints are inconsistent")
            free = gf2.nullspace(self.constraints)
        else:
            base = np.zeros(self.m, dtype=np.uint8)
            free = np.eye(self.m, dtype=np.uint8)
        weight = 2.0 ** (-self.dimension)
        patterns = {}
        for mask in range(2 ** free.shape[0]):
            bits = base.copy()
            for k in range(free.shape[0]):
                if (mask >> k) & 1:
                    bits ^= free[k]
            patterns["".join("-" if b else "+" for b in bits.tolist())] = weight
        return patterns


def syndrome_distribution(code: StabilizerCode, sigma) -> SyndromeDistribution:
    """
    P_sigma over the outcomes of all code generators.

    A product of generators prod_i g_i**c_i is deterministic on sigma exactly
    when it equals, up to sign, an element of sigma's group; those products
    give the parity constraints, everything else is uniform.
    """
    group = _group_of(sigma)
    if group.n != code.n:
        raise InputError(f"state has {group.n} qubits, code has {code.n}")
    m = len(code.generators)
    stacked = np.vstack([code.matrix, group.matrix]) if group.rank else code.matrix
    combos = gf2.left_nullspace(stacked)
    constraints = []
    rhs = []
    for combo in combos:
        picked = np.flatnonzero(combo[:m])
        left = product((code.generators[i] for i in picked), n=code.n)
        right_phase = group.combine(combo[m:]).phase if group.rank else 0
        diff = (left.phase - right_phase) % 4
        if diff % 2:
            raise AlgebraError("a product of generators is not Hermitian")
        constraints.append(combo[:m])
        rhs.append(diff // 2)
    matrix = np.array(constraints, dtype=np.uint8).reshape(len(constraints), m)
    return SyndromeDistribution(m, matrix, np.array(rhs, dtype=np.uint8))


def mixed_gem_syndrome_bound(
    rho: MixedStabilizerState,
    sigma,
    code: StabilizerCode | None = None,
) -> float:
    """
    Tr(Pi_S sigma) for a symmetric rho; sigma is a stabilizer state or a
    list of (probability, stabilizer state) pairs.

    Measuring the generators is a channel, so the fidelity between rho and
    sigma is at most the all-plus probability of sigma's syndrome.

    Raises:
        PreconditionError: rho is not symmetric under the code.
    """
    if code is not None:
        check = verify_one_form_symmetry(rho, code)
        if not check:
            raise PreconditionError(
                f"rho violates {len(check.violations)} generators of {code.name}"
            )
        group = code.basis
    else:
        group = rho.group
    if isinstance(sigma, (list, tuple)):
        total = sum(float(weight) for weight, _ in sigma)
        if abs(total - 1.0) > 1e-9:
            raise InputError(f"ensemble weights sum to {total}, not 1")
        return float(sum(float(weight) * projector_overlap(group, s) for weight, s in sigma))
    return projector_overlap(group, sigma)
