"""
String operators: stabilizer truncation, braiding triples built from
cleaned logicals, honeycomb link strings and exchange junctions.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from . import conf, gf2
from .codes import Link, StabilizerCode, honeycomb_links, link_operator
from .exceptions import (
    CertificateFailure,
    CleaningFailure,
    ConstructionError,
    DeformationInfeasible,
    FeasibilityError,
    InputError,
    MembershipError,
)
from .geometry import (
    Region,
    bounding_box,
    box,
    build_mesh,
    connected_components,
    disk,
    half_disk,
)
from .logicals import MeshLogicalReport, clean_logical, is_correctable, restricted_parity
from .pauli import (
    PauliOperator,
    anticommutation_vector,
    commutes,
    express_in_generators,
    multiply,
    product,
    region_ids,
)

logger = logging.getLogger(__name__)


def truncate_stabilizer(
    code: StabilizerCode,
    s: PauliOperator,
    region,
    decomposition: Sequence[int] | None = None,
) -> PauliOperator:
    """
    Keep only the generators of s's decomposition that meet `region`.

    The result is a stabilizer supported within the region thickened by
    the generator diameter, and it agrees with s on the region. Pass
    `decomposition` (generator indices whose product is s) to skip the
    basis solve.

    Raises:
        MembershipError: when s is not a stabilizer with matching sign.
    """
    if decomposition is None:
        found = express_in_generators(code.basis, s)
        if found is None or not found.sign_matches:
            raise MembershipError(f"{s!r} is not an element of the stabilizer group")
        indices = [code.basis_indices[i] for i in found.indices]
    else:
        indices = list(decomposition)
        rebuilt = product((code.generators[i] for i in indices), n=code.n)
        if rebuilt != s:
            raise MembershipError("decomposition does not reproduce the operator")
    ids = set(int(q) for q in region_ids(region))
    kept = [i for i in indices if ids.intersection(int(q) for q in code.supports[i])]
    return product((code.generators[i] for i in kept), n=code.n)


@dataclass
class BraidingTriple:
    """A loop gamma1 in the group and an open string split as gamma2, gamma2p."""

    gamma1: PauliOperator
    gamma2: PauliOperator
    gamma2p: PauliOperator
    Q: Region
    Qup: Region
    Qup_prime: Region
    provenance: dict = field(default_factory=dict)

    def verify(self, code: StabilizerCode, basis=None) -> None:
        """Raise ConstructionError naming the first invariant that fails."""
        group = basis if basis is not None else code.basis
        if not group.contains(self.gamma1):
            raise ConstructionError("gamma1 is not a stabilizer", step="verify:gamma1")
        if not group.contains(multiply(self.gamma2, self.gamma2p)):
            raise ConstructionError(
                "gamma2 * gamma2p is not a stabilizer", step="verify:split"
            )
        if commutes(self.gamma1, self.gamma2):
            raise ConstructionError("gamma1 commutes with gamma2", step="verify:gamma2")
        if commutes(self.gamma1, self.gamma2p):
            raise ConstructionError("gamma1 commutes with gamma2p", step="verify:gamma2p")


def _squares_union(squares: Sequence[Region], extra: Region, label: str) -> Region:
    members = set(extra.qubits)
    for square in squares:
        members.update(square.qubits)
    return Region.of(members, label)


def check_mesh_feasible(code: StabilizerCode, spec, name: str) -> list[Region]:
    """Squares of the mesh, after checking each one is correctable."""
    squares, _ = build_mesh(code.layout, spec)
    for square in squares:
        if not is_correctable(code, square):
            raise FeasibilityError(
                f"square {square.label} of {name} ({len(square)} qubits) supports a logical",
                constraint=f"{name}:{square.label}:correctable",
            )
    return squares


def _clean_with_fallback(code, logical, squares, local_box: Region, steps: list, name: str):
    """Clean off the mesh squares and the box; fall back to the box alone."""
    try:
        cleaned, used = clean_logical(
            code, logical, _squares_union(squares, local_box, name), with_generators=True
        )
        mode = "squares+box"
    except CleaningFailure:
        try:
            cleaned, used = clean_logical(code, logical, local_box, with_generators=True)
        except CleaningFailure as exc:
            raise FeasibilityError(
                f"cannot deform {name} away from {local_box.label}", constraint=f"{name}:box"
            ) from exc
        mode = "box"
    steps.append({"step": f"clean:{name}", "mode": mode, "generators": len(used)})
    return cleaned, used


def _box_corner_reach(layout, center, region: Region) -> float:
    x0, y0, x1, y1 = region.bounds
    corners = np.array([(x0, y0), (x0, y1), (x1, y0), (x1, y1)])
    return float(np.hypot(*(corners - np.asarray(center)).T).max())


def build_braiding_triple(
    code: StabilizerCode,
    report: MeshLogicalReport,
    deformed_specs=None,
    block: Region | None = None,
    prechecked: bool = False,
) -> BraidingTriple:
    """
    Build and verify a braiding triple at an odd crossing of the report's logicals.

    l1 is deformed off a box B1 around the crossing block; S = l1 l1' is a
    stabilizer agreeing with l1 on B1. Truncating S to a half-disk whose
    horizontal edge sits just below the smaller box2 gives the loop gamma1.
    The same deformation of l2 off box2 gives a local stabilizer S2, split
    into gamma2 = S2 on box2 and gamma2p = gamma2 S2.

    Raises:
        FeasibilityError: a deformed mesh has a non-correctable square, or a
            logical cannot be moved off its box.
        ConstructionError: a verification step fails; `step` names it.
    """
    layout = code.layout
    w = code.w
    spec1, spec2 = deformed_specs or (report.spec1, report.spec2)
    if prechecked:
        squares1, squares2 = report.squares1, report.squares2
    else:
        squares1 = check_mesh_feasible(code, spec1, "mesh1")
        squares2 = check_mesh_feasible(code, spec2, "mesh2")
    l1, l2 = report.l1, report.l2
    steps: list[dict] = []

    if block is None:
        overlap = Region.of(
            set(l1.support.tolist()) & set(l2.support.tolist()) & set(report.Q.qubits), "overlap"
        )
        odd = [b for b in connected_components(layout, overlap, w) if restricted_parity(l1, l2, b)]
        if not odd:
            raise ConstructionError(f"no odd crossing block inside {report.Q.label}", step="overlap")
        block = odd[0]
    steps.append({"step": "overlap", "block": list(block.qubits)})

    margin1 = w
    B1 = bounding_box(layout, block, margin=margin1, label="B1")
    l1p, used1 = _clean_with_fallback(code, l1, squares1, B1, steps, "l1")
    S = product((code.generators[i] for i in used1), n=code.n)
    if S != multiply(l1, l1p):
        raise ConstructionError("l1 l1' is not the product of the cleaning generators", step="S")

    box2 = None
    margin2 = 0.0
    step = layout.spacing / 2
    while margin2 <= margin1 + 1e-9:
        candidate = bounding_box(layout, block, margin=margin2, label="box2")
        if candidate.issubset(B1) and restricted_parity(l1, l2, candidate):
            box2 = candidate
            break
        margin2 += step
    if box2 is None:
        raise ConstructionError("no box around the block carries odd parity", step="box2")
    steps.append({"step": "box2", "margin": margin2, "size": len(box2)})

    l2p, used2 = _clean_with_fallback(code, l2, squares2, box2, steps, "l2")
    center = layout.centroid(block.qubits)
    reach = _box_corner_reach(layout, center, box2)
    D2 = disk(layout, center, reach + w, label="D2")
    S2 = truncate_stabilizer(
        code, multiply(l2, l2p), D2, decomposition=used2
    )
    box_ids = np.array(box2.qubits, dtype=np.int64)
    mask = np.zeros(code.n, dtype=np.uint8)
    mask[box_ids] = 1
    gamma2 = PauliOperator(S2.x & mask, S2.z & mask, 0)
    gamma2p = multiply(gamma2, S2)
    steps.append({"step": "split", "gamma2_weight": gamma2.weight, "gamma2p_weight": gamma2p.weight})

    factor = float(conf.get("TRUNCATION_RADIUS_FACTOR"))
    radius = max(factor * w, reach + w)
    x0, y0, x1, y1 = box2.bounds
    lower = y0 - float(center[1])
    upper = y1 - float(center[1])
    shapes = [
        ("up", min(0.0, lower) - step, lower < 0),
        ("down", max(0.0, upper) + step, upper > 0),
        ("disk", None, False),
    ]
    gamma1 = None
    for side, cut, clamped in shapes:
        if side == "disk":
            H = disk(layout, center, radius, label="H")
        else:
            H = half_disk(layout, center, radius, cut, side=side, label="H")
        if not box2.issubset(H):
            continue
        candidate = truncate_stabilizer(code, S, H, decomposition=used1)
        if not commutes(candidate, gamma2):
            gamma1 = candidate
            steps.append(
                {"step": "truncate", "shape": side, "cut": cut, "clamped": clamped, "radius": radius}
            )
            break
        logger.debug("half-disk %s commutes with gamma2; trying the next shape", side)
    if gamma1 is None:
        raise ConstructionError("no truncation of S anticommutes with gamma2", step="truncate")

    Qup_prime = Region.of(
        set(gamma1.support.tolist()) & set(gamma2p.support.tolist()), "Qup'"
    )
    triple = BraidingTriple(
        gamma1=gamma1,
        gamma2=gamma2,
        gamma2p=gamma2p,
        Q=report.Q,
        Qup=Region(block.qubits, "Qup"),
        Qup_prime=Qup_prime,
        provenance={
            "steps": steps,
            "w": w,
            "margin1": margin1,
            "margin2": margin2,
            "radius_factor": factor,
            "spec1": spec1.as_dict(),
            "spec2": spec2.as_dict(),
        },
    )
    triple.verify(code)
    logger.info(
        "braiding triple at %s: |gamma1|=%d |gamma2|=%d |gamma2p|=%d",
        report.Q.label,
        gamma1.weight,
        gamma2.weight,
        gamma2p.weight,
    )
    return triple


def deform_string(code: StabilizerCode, gamma: PauliOperator, forbidden) -> PauliOperator:
    """
    A stabilizer-equivalent copy of gamma avoiding `forbidden`.

    Raises:
        DeformationInfeasible: when every equivalent string meets the region.
    """
    try:
        return clean_logical(code, gamma, forbidden)
    except CleaningFailure as exc:
        raise DeformationInfeasible(
            f"{gamma!r} cannot be moved off a region of {len(region_ids(forbidden))} qubits"
        ) from exc


# ----------------------------------------------------------------------
# Patch-local witnesses
# ----------------------------------------------------------------------


def _patch_partner(code: StabilizerCode, gamma: PauliOperator, crossing: Region, patch: Region):
    """
    A Hermitian copy of gamma times a stabilizer, inside the patch, with a
    different support: gamma moved off the crossing when that stays in the
    patch, else gamma times the nearest inside generator that commutes with it.
    """
    inside = set(patch.qubits)
    support = gamma.support
    try:
        moved = deform_string(code, gamma, crossing)
    except DeformationInfeasible:
        moved = None
    if (
        moved is not None
        and moved.is_hermitian
        and set(moved.support.tolist()) <= inside
        and not np.array_equal(moved.support, support)
    ):
        return moved, "deformed"
    anchor = np.array(crossing.qubits or support.tolist(), dtype=np.int64)
    near = code.layout.distance_to_region(anchor)
    for i in sorted(code.inside(patch), key=lambda i: (float(near[code.supports[i]].min()), i)):
        g = code.generators[i]
        if not commutes(gamma, g):
            continue
        moved = multiply(gamma, g)
        if not np.array_equal(moved.support, support):
            return moved, f"generator:{i}"
    raise CertificateFailure(
        f"no stabilizer moves the open string inside {patch.label}", patch=patch.label
    )


def patch_braiding_witness(code: StabilizerCode, patch: Region) -> BraidingTriple:
    """
    Braiding witness confined to one patch.

    The loop is the product of the generators inside the core box (half the
    patch side). The open string is a GF(2) solution on the patch that
    anticommutes with the core generator nearest the centre and commutes
    with every other generator away from the patch rim. Its partner gamma2p
    is the same string times a stabilizer, with a different support.
    """
    if patch.bounds is None:
        raise InputError(f"patch {patch.label} has no bounds")
    layout = code.layout
    x0, y0, x1, y1 = patch.bounds
    side = x1 - x0
    center = np.array([(x0 + x1) / 2, (y0 + y1) / 2])
    w = code.w
    core = box(layout, center, side / 4, side / 4, label="core")
    inner = box(layout, center, side / 2 - w / 2, side / 2 - w / 2, label="inner")
    core_gens = code.inside(core)
    if not core_gens:
        raise CertificateFailure(f"no generator fits the core of {patch.label}", patch=patch.label)
    centroids = np.array([layout.centroid(code.supports[i]) for i in core_gens])
    offsets = layout.wrap(centroids - center)
    excited = core_gens[int(np.argmin(np.hypot(offsets[:, 0], offsets[:, 1])))]
    gamma1 = product((code.generators[i] for i in core_gens), n=code.n)

    ids = np.array(patch.qubits, dtype=np.int64)
    inner_gens = set(code.inside(inner))
    constrained = [i for i in code.touching(ids) if i in inner_gens]
    if excited not in inner_gens:
        raise CertificateFailure(f"{patch.label} is too small for its generators", patch=patch.label)
    n = code.n
    rows = []
    rhs = []
    for i in constrained:
        g = code.generators[i]
        rows.append(np.concatenate([g.z[ids], g.x[ids]]))
        rhs.append(1 if i == excited else 0)
    solution = gf2.solve_linear(np.array(rows, dtype=np.uint8), np.array(rhs, dtype=np.uint8))
    if solution is None:
        raise CertificateFailure(f"no open string ends inside {patch.label}", patch=patch.label)
    x = np.zeros(n, dtype=np.uint8)
    z = np.zeros(n, dtype=np.uint8)
    x[ids] = solution[: ids.size]
    z[ids] = solution[ids.size :]
    gamma2 = PauliOperator(x, z)
    crossing = Region.of(set(gamma1.support.tolist()) & set(gamma2.support.tolist()), "crossing")
    gamma2p, split = _patch_partner(code, gamma2, crossing, patch)

    triple = BraidingTriple(
        gamma1=gamma1,
        gamma2=gamma2,
        gamma2p=gamma2p,
        Q=Region(patch.qubits, patch.label),
        Qup=Region.of(np.concatenate([code.supports[i] for i in core_gens]), "core"),
        Qup_prime=Region.of(set(gamma1.support.tolist()) & set(gamma2p.support.tolist()), "Qup'"),
        provenance={
            "patch": patch.label,
            "core_generators": len(core_gens),
            "excited_generator": int(excited),
            "constrained_generators": len(constrained),
            "split": split,
        },
    )
    local = code.local_basis(code.touching(ids))
    try:
        triple.verify(code, basis=local)
    except ConstructionError as exc:
        raise CertificateFailure(f"{patch.label}: {exc}", patch=patch.label) from exc
    return triple


# ----------------------------------------------------------------------
# Honeycomb strings and exchange junctions
# ----------------------------------------------------------------------


def _link_key(link: Link) -> tuple[int, int, str]:
    return (min(link.a, link.b), max(link.a, link.b), link.kind)


def honeycomb_string(code: StabilizerCode, path: Sequence[Link], with_endpoints: bool = False):
    """
    Ordered product of the link operators along a connected path.

    With `with_endpoints` the odd-degree sites of the path (none for a
    closed loop) are returned too.
    """
    if not path:
        raise InputError("a string needs at least one link")
    known = {_link_key(link) for link in honeycomb_links(code)}
    for index, link in enumerate(path):
        if _link_key(link) not in known:
            raise InputError(f"link {link} is not a link of {code.name}")
        if index and not ({link.a, link.b} & {path[index - 1].a, path[index - 1].b}):
            raise InputError(f"links {index - 1} and {index} do not share a site")
    string = product(link_operator(code.n, link) for link in path)
    return (string, path_endpoints(path)) if with_endpoints else string


def path_endpoints(path: Sequence[Link]) -> list[int]:
    """Sites of odd degree along the path (empty for a closed loop)."""
    degree: dict[int, int] = {}
    for link in path:
        for site in (link.a, link.b):
            degree[site] = degree.get(site, 0) + 1
    return sorted(site for site, count in degree.items() if count % 2)


@dataclass
class ExchangeTriple:
    """Three hopping strings sharing one junction site."""

    m1: PauliOperator
    m2: PauliOperator
    m3: PauliOperator
    junction: int
    endpoints: dict[str, Region]
    arms: tuple[tuple[Link, ...], ...] = ()

    def verify(self, code: StabilizerCode) -> None:
        for name, m in (("m1", self.m1), ("m2", self.m2), ("m3", self.m3)):
            if anticommutation_vector(code.matrix, m).any():
                raise ConstructionError(f"{name} anticommutes with a generator", step="symmetry")
        for a, b in (("m1", "m2"), ("m1", "m3"), ("m2", "m3")):
            if commutes(getattr(self, a), getattr(self, b)):
                raise ConstructionError(f"{a} and {b} commute", step="anticommutation")


def _arm_sites(junction: int, arm: Sequence[Link]) -> set[int]:
    site = junction
    visited = {junction}
    for link in arm:
        if not link.touches(site):
            raise InputError(f"arm is not a path from site {junction}")
        site = link.other(site)
        visited.add(site)
    return visited


def exchange_triple(
    code: StabilizerCode, junction: int, arm_paths: Sequence[Sequence[Link]]
) -> ExchangeTriple:
    """
    Hopping strings along three arms leaving the junction.

    Raises:
        InputError: arms that do not start at the junction or that share
            any other site.
        ConstructionError: the strings fail to anticommute pairwise.
    """
    if len(arm_paths) != 3:
        raise InputError(f"an exchange junction needs three arms, got {len(arm_paths)}")
    ends = []
    seen: set[int] = set()
    for index, arm in enumerate(arm_paths):
        if not arm:
            raise InputError(f"arm {index} is empty")
        visited = _arm_sites(junction, arm)
        overlap = (visited - {junction}) & seen
        if overlap:
            raise InputError(f"arm {index} overlaps another arm at sites {sorted(overlap)}")
        seen |= visited - {junction}
    strings = []
    for index, arm in enumerate(arm_paths):
        string, tips = honeycomb_string(code, arm, with_endpoints=True)
        far = [site for site in tips if site != junction]
        if junction not in tips or len(far) != 1:
            raise InputError(f"arm {index} is not an open path from site {junction}")
        strings.append(string)
        ends.append(far[0])
    m1, m2, m3 = strings
    triple = ExchangeTriple(
        m1,
        m2,
        m3,
        junction,
        endpoints={
            "A": Region((ends[0],), "A"),
            "B": Region((ends[1],), "B"),
            "C": Region((ends[2],), "C"),
            "D": Region((junction,), "D"),
        },
        arms=tuple(tuple(arm) for arm in arm_paths),
    )
    triple.verify(code)
    logger.debug("exchange triple at site %d, arm ends %s", junction, ends)
    return triple


def canonical_t_junction(
    code: StabilizerCode, junction: int = 0, arm_length: int = 1
) -> ExchangeTriple:
    """
    T-junction using the X, Y and Z links of one site, each arm extended
    greedily to `arm_length` links without revisiting sites.
    """
    links = honeycomb_links(code)
    order = {"X": 0, "Y": 1, "Z": 2}
    at_junction = sorted((l for l in links if l.touches(junction)), key=lambda l: order[l.kind])
    if len(at_junction) != 3:
        raise ConstructionError(f"site {junction} does not have three links", step="junction")
    used_sites = {junction}
    arms = []
    for first in at_junction:
        arm = [first]
        site = first.other(junction)
        if site in used_sites:
            raise ConstructionError("the lattice is too small for disjoint arms", step="arms")
        used_sites.add(site)
        while len(arm) < arm_length:
            options = sorted(
                (l for l in links if l.touches(site) and l.other(site) not in used_sites),
                key=lambda l: (order[l.kind], l.other(site)),
            )
            if not options:
                raise ConstructionError("the lattice is too small for disjoint arms", step="arms")
            step = options[0]
            site = step.other(site)
            used_sites.add(site)
            arm.append(step)
        arms.append(arm)
    return exchange_triple(code, junction, arms)


def patch_exchange_witness(code: StabilizerCode, patch: Region) -> ExchangeTriple:
    """Canonical junction at the first site of the patch."""
    return canonical_t_junction(code, junction=patch.qubits[0], arm_length=1)
