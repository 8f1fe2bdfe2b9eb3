"""
Planar geometry for qubit layouts: regions, thickening, meshes and patches.

Distances are Euclidean and, on a torus, taken over the nearest periodic
image. Squares and patches are half-open boxes so that lattice points on a
boundary belong to exactly one of them.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .exceptions import ConfigurationError, InputError

logger = logging.getLogger(__name__)

_EPS = 1e-9
_CHUNK = 512


@dataclass(frozen=True)
class Region:
    """Sorted set of qubit ids with a free-text label."""

    qubits: tuple[int, ...] = ()
    label: str = ""
    bounds: tuple[float, float, float, float] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(sorted({int(q) for q in self.qubits})))

    @classmethod
    def of(cls, qubits: Iterable[int], label: str = "") -> Region:
        return cls(tuple(int(q) for q in qubits), label)

    def __len__(self) -> int:
        return len(self.qubits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.qubits)

    def __contains__(self, qubit: object) -> bool:
        return qubit in set(self.qubits)

    @property
    def ids(self) -> np.ndarray:
        return np.array(self.qubits, dtype=np.int64)

    def union(self, *others: Region, label: str = "") -> Region:
        merged = set(self.qubits)
        for other in others:
            merged |= set(other.qubits)
        return Region.of(merged, label or self.label)

    def intersection(self, other: Region, label: str = "") -> Region:
        return Region.of(set(self.qubits) & set(other.qubits), label or self.label)

    def difference(self, other: Region, label: str = "") -> Region:
        return Region.of(set(self.qubits) - set(other.qubits), label or self.label)

    def is_disjoint(self, other: Region) -> bool:
        return set(self.qubits).isdisjoint(other.qubits)

    def issubset(self, other: Region) -> bool:
        return set(self.qubits).issubset(other.qubits)

    def __repr__(self) -> str:
        return f"<Region {self.label or '-'} size={len(self.qubits)}>"


@dataclass(frozen=True)
class MeshSpec:
    """Squares of side `square_size` separated by at least `separation`."""

    square_size: float
    separation: float
    offset: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.square_size <= 0 or self.separation <= 0:
            raise ConfigurationError(
                f"mesh needs positive square size and separation, got "
                f"{self.square_size} and {self.separation}"
            )
        object.__setattr__(self, "offset", (float(self.offset[0]), float(self.offset[1])))

    @property
    def pitch(self) -> float:
        return self.square_size + self.separation

    def shifted(self, dx: float, dy: float) -> MeshSpec:
        return MeshSpec(self.square_size, self.separation, (self.offset[0] + dx, self.offset[1] + dy))

    def as_dict(self) -> dict:
        return {
            "square_size": self.square_size,
            "separation": self.separation,
            "offset": list(self.offset),
        }


class LatticeLayout:
    """
    Qubit positions in the plane, optionally wrapped on a torus.

    `spacing` is the nearest-neighbour scale of the underlying lattice; it is
    used for the extent of open layouts and by callers converting lattice
    lengths into coordinates.
    """

    def __init__(
        self,
        positions,
        periods: tuple[float, float] | None = None,
        spacing: float = 1.0,
    ):
        pos = np.asarray(positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise InputError("positions must be an (n, 2) array")
        pos.setflags(write=False)
        self.positions = pos
        self.periods = (float(periods[0]), float(periods[1])) if periods is not None else None
        if self.periods is not None and min(self.periods) <= 0:
            raise ConfigurationError(f"periods must be positive, got {periods}")
        self.spacing = float(spacing)

    @property
    def n(self) -> int:
        return int(self.positions.shape[0])

    @property
    def is_periodic(self) -> bool:
        return self.periods is not None

    @property
    def origin(self) -> np.ndarray:
        if self.periods is not None or self.n == 0:
            return np.zeros(2)
        return self.positions.min(axis=0)

    @property
    def extent(self) -> np.ndarray:
        if self.periods is not None:
            return np.array(self.periods)
        if self.n == 0:
            return np.zeros(2)
        return np.ptp(self.positions, axis=0) + self.spacing

    def wrap(self, delta: np.ndarray) -> np.ndarray:
        """Minimal-image version of displacement vectors."""
        if self.periods is None:
            return delta
        per = np.array(self.periods)
        return delta - per * np.round(delta / per)

    def displacement(self, origin, targets=None) -> np.ndarray:
        """Displacements from a point to all qubits (or to `targets` points)."""
        pts = self.positions if targets is None else np.asarray(targets, dtype=float)
        return self.wrap(pts - np.asarray(origin, dtype=float))

    def distance(self, a: int, b: int) -> float:
        return float(np.hypot(*self.wrap(self.positions[b] - self.positions[a])))

    def distances_from(self, point) -> np.ndarray:
        d = self.displacement(point)
        return np.hypot(d[:, 0], d[:, 1])

    def distance_to_region(self, region) -> np.ndarray:
        """For every qubit, the distance to the nearest qubit of `region`."""
        ids = _ids(region)
        best = np.full(self.n, np.inf)
        for start in range(0, ids.size, _CHUNK):
            chunk = self.positions[ids[start : start + _CHUNK]]
            delta = self.wrap(self.positions[:, None, :] - chunk[None, :, :])
            dist = np.hypot(delta[..., 0], delta[..., 1]).min(axis=1)
            best = np.minimum(best, dist)
        return best

    def pairwise(self, qubits) -> np.ndarray:
        ids = _ids(qubits)
        pts = self.positions[ids]
        delta = self.wrap(pts[:, None, :] - pts[None, :, :])
        return np.hypot(delta[..., 0], delta[..., 1])

    def diameter(self, qubits) -> float:
        ids = _ids(qubits)
        if ids.size < 2:
            return 0.0
        return float(self.pairwise(ids).max())

    def centroid(self, qubits) -> np.ndarray:
        """Mean position, unwrapped around the first qubit on a torus."""
        ids = _ids(qubits)
        if ids.size == 0:
            raise InputError("centroid of an empty region")
        ref = self.positions[ids[0]]
        return ref + self.wrap(self.positions[ids] - ref).mean(axis=0)

    def as_dict(self) -> dict:
        return {
            "positions": self.positions.tolist(),
            "periods": list(self.periods) if self.periods is not None else None,
            "spacing": self.spacing,
        }

    def __repr__(self) -> str:
        return f"<LatticeLayout n={self.n} periods={self.periods}>"


def _ids(region) -> np.ndarray:
    qubits = getattr(region, "qubits", region)
    return np.array(sorted(int(q) for q in qubits), dtype=np.int64)


def _position_keys(layout: LatticeLayout, points) -> list[tuple[float, float]]:
    pts = np.array(points, dtype=float)
    if layout.periods is not None:
        per = np.array(layout.periods)
        pts = np.mod(pts, per)
        pts[np.isclose(pts, per)] = 0.0
    # adding 0.0 turns -0.0 into 0.0
    return [tuple(row) for row in (np.round(pts, 6) + 0.0).tolist()]


def translation_map(layout: LatticeLayout, shift) -> np.ndarray | None:
    """
    Image of every qubit under a translation by `shift`, or None when the
    moved positions are not all qubit positions.
    """
    index = {key: q for q, key in enumerate(_position_keys(layout, layout.positions))}
    moved = layout.positions + np.asarray(shift, dtype=float)
    image = np.empty(layout.n, dtype=np.int64)
    for q, key in enumerate(_position_keys(layout, moved)):
        target = index.get(key)
        if target is None:
            return None
        image[q] = target
    return image


def thicken(layout: LatticeLayout, region, w: float, label: str = "") -> Region:
    """R+ = every qubit within distance w of the region."""
    if w < 0:
        raise InputError(f"thickening width must be nonnegative, got {w}")
    ids = _ids(region)
    name = label or f"{getattr(region, 'label', '') or 'R'}+"
    if ids.size == 0:
        return Region((), name)
    dist = layout.distance_to_region(ids)
    return Region.of(np.flatnonzero(dist <= w + _EPS), name)


def disk(layout: LatticeLayout, center, radius: float, label: str = "disk") -> Region:
    return Region.of(np.flatnonzero(layout.distances_from(center) <= radius + _EPS), label)


def half_disk(
    layout: LatticeLayout,
    center,
    radius: float,
    cut: float,
    side: str = "up",
    label: str = "",
) -> Region:
    """Qubits of a disk on one side of the horizontal line y = center.y + cut."""
    d = layout.displacement(center)
    inside = np.hypot(d[:, 0], d[:, 1]) <= radius + _EPS
    if side == "up":
        inside &= d[:, 1] >= cut - _EPS
    elif side == "down":
        inside &= d[:, 1] <= cut + _EPS
    else:
        raise InputError(f"unknown half-disk side {side!r}")
    return Region.of(np.flatnonzero(inside), label or f"half-disk-{side}")


def box(layout: LatticeLayout, center, half_x: float, half_y: float, label: str = "box") -> Region:
    """Closed axis-aligned box around a point."""
    d = layout.displacement(center)
    inside = (np.abs(d[:, 0]) <= half_x + _EPS) & (np.abs(d[:, 1]) <= half_y + _EPS)
    cx, cy = (float(v) for v in center)
    return Region(
        tuple(np.flatnonzero(inside)),
        label,
        bounds=(cx - half_x, cy - half_y, cx + half_x, cy + half_y),
    )


def bounding_box(layout: LatticeLayout, region, margin: float = 0.0, label: str = "") -> Region:
    """The closed box spanned by a region's qubits, grown by `margin`."""
    ids = _ids(region)
    center = layout.centroid(ids)
    d = layout.displacement(center, layout.positions[ids])
    lo = d.min(axis=0)
    hi = d.max(axis=0)
    mid = center + (lo + hi) / 2
    half = (hi - lo) / 2 + margin
    return box(layout, mid, half[0], half[1], label or "bbox")


def connected_components(layout: LatticeLayout, region, radius: float) -> list[Region]:
    """Split a region into clusters whose members chain within `radius`."""
    ids = _ids(region)
    if ids.size == 0:
        return []
    graph = nx.Graph()
    graph.add_nodes_from(int(q) for q in ids)
    rows, cols = np.nonzero(np.triu(layout.pairwise(ids) <= radius + _EPS, k=1))
    graph.add_edges_from((int(ids[r]), int(ids[c])) for r, c in zip(rows, cols))
    components = sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])
    return [Region.of(members, f"block{i}") for i, members in enumerate(components)]


# ----------------------------------------------------------------------
# Meshes and patches
# ----------------------------------------------------------------------


def _axis_count(extent: float, size: float, gap: float, periodic: bool) -> int:
    pitch = size + gap
    if periodic:
        return max(1, math.floor(extent / pitch + _EPS))
    return max(1, math.floor((extent + gap) / pitch + _EPS))


def _relative(layout: LatticeLayout, offset) -> np.ndarray:
    rel = layout.positions - layout.origin - np.asarray(offset, dtype=float)
    if layout.periods is not None:
        rel = np.mod(rel, np.array(layout.periods))
        # values within rounding of the period wrap to zero
        rel[np.isclose(rel, np.array(layout.periods))] = 0.0
    return rel


def _cells(layout: LatticeLayout, size: float, gap: float, offset):
    """Per-qubit (cell index, inside-square flag) for a square packing."""
    extent = layout.extent
    periodic = layout.is_periodic
    counts = [_axis_count(float(extent[a]), size, gap, periodic) for a in (0, 1)]
    pitch = size + gap
    rel = _relative(layout, offset)
    cells = np.zeros((layout.n, 2), dtype=np.int64)
    inside = np.ones(layout.n, dtype=bool)
    for a in (0, 1):
        u = rel[:, a]
        c = np.clip(np.floor((u + _EPS) / pitch).astype(np.int64), 0, counts[a] - 1)
        local = u - c * pitch
        cells[:, a] = c
        inside &= (local >= -_EPS) & (local < size - _EPS)
    return cells, inside, counts


def _group_by_cell(cells: np.ndarray, inside: np.ndarray) -> dict[tuple[int, int], list[int]]:
    by_cell: dict[tuple[int, int], list[int]] = {}
    for q in np.flatnonzero(inside):
        by_cell.setdefault((int(cells[q, 0]), int(cells[q, 1])), []).append(int(q))
    return by_cell


def _row_major(keys) -> list[tuple[int, int]]:
    return sorted(keys, key=lambda k: (k[1], k[0]))


def build_mesh(layout: LatticeLayout, spec: MeshSpec) -> tuple[list[Region], Region]:
    """
    Pack squares A_j row-major and return them with their complement.

    Raises:
        ConfigurationError: when a single square does not fit the layout.
    """
    extent = layout.extent
    if spec.square_size > float(extent.min()) + _EPS:
        raise ConfigurationError(
            f"square size {spec.square_size} exceeds layout extent {tuple(extent)}"
        )
    if spec.square_size >= float(extent.max()) - _EPS:
        everything = Region.of(range(layout.n), "A[0,0]")
        return [everything], Region((), "mesh")
    cells, inside, _ = _cells(layout, spec.square_size, spec.separation, spec.offset)
    by_cell = _group_by_cell(cells, inside)
    squares = [Region.of(by_cell[key], f"A[{key[0]},{key[1]}]") for key in _row_major(by_cell)]
    mesh = Region.of(np.flatnonzero(~inside), "mesh")
    logger.debug(
        "mesh a=%s s=%s offset=%s: %d squares, %d mesh qubits",
        spec.square_size,
        spec.separation,
        spec.offset,
        len(squares),
        len(mesh),
    )
    return squares, mesh


def gap_centers(layout: LatticeLayout, spec: MeshSpec, axis: int) -> list[float]:
    """Centre coordinate, along `axis`, of every gap strip of the mesh."""
    if axis not in (0, 1):
        raise InputError(f"axis must be 0 or 1, got {axis}")
    extent = float(layout.extent[axis])
    counts = _axis_count(extent, spec.square_size, spec.separation, layout.is_periodic)
    base = float(layout.origin[axis]) + spec.offset[axis]
    centers = []
    for c in range(counts):
        start = c * spec.pitch + spec.square_size
        stop = (c + 1) * spec.pitch if c < counts - 1 else max(extent, start + spec.separation)
        centers.append(base + (start + stop) / 2)
    return centers


def mesh_cells(layout: LatticeLayout, spec: MeshSpec) -> np.ndarray:
    """Cell index (cx, cy) of every qubit, for squares and the gaps after them."""
    cells, _, _ = _cells(layout, spec.square_size, spec.separation, spec.offset)
    return cells


def intersection_squares(layout: LatticeLayout, spec1: MeshSpec, spec2: MeshSpec) -> list[Region]:
    """
    Pieces of mesh1 and mesh2 overlap, grouped by the cells they sit in.

    Ordered row-major by the lowest (y, x) position in each piece.
    """
    _, mesh1 = build_mesh(layout, spec1)
    _, mesh2 = build_mesh(layout, spec2)
    common = mesh1.intersection(mesh2)
    if not common.qubits:
        return []
    cells1 = mesh_cells(layout, spec1)
    cells2 = mesh_cells(layout, spec2)
    groups: dict[tuple[int, int, int, int], list[int]] = {}
    for q in common.qubits:
        key = (*cells1[q], *cells2[q])
        groups.setdefault(tuple(int(v) for v in key), []).append(q)
    pos = layout.positions

    def corner(members: list[int]) -> tuple[float, float]:
        return min((pos[q, 1], pos[q, 0]) for q in members)

    ordered = sorted(groups.values(), key=corner)
    return [Region.of(members, f"Q{i}") for i, members in enumerate(ordered)]


def partition_into_patches(layout: LatticeLayout, patch_size: float, gap: float) -> list[Region]:
    """
    Row-major packing of disjoint square patches separated by more than `gap`.

    Returns an empty list when one patch does not fit.
    """
    if patch_size <= 0 or gap <= 0:
        raise ConfigurationError("patch size and gap must be positive")
    extent = layout.extent
    if patch_size > float(extent.min()) + _EPS:
        logger.info("patch size %s does not fit layout extent %s", patch_size, tuple(extent))
        return []
    if patch_size >= float(extent.max()) - _EPS:
        return [Region(tuple(range(layout.n)), "P[0,0]", bounds=(0.0, 0.0, *extent))]
    cells, inside, _ = _cells(layout, patch_size, gap, (0.0, 0.0))
    pitch = patch_size + gap
    origin = layout.origin
    by_cell = _group_by_cell(cells, inside)
    patches = []
    for cx, cy in _row_major(by_cell):
        x0 = float(origin[0] + cx * pitch)
        y0 = float(origin[1] + cy * pitch)
        patches.append(
            Region(
                tuple(by_cell[(cx, cy)]),
                f"P[{cx},{cy}]",
                bounds=(x0, y0, x0 + patch_size, y0 + patch_size),
            )
        )
    logger.debug("partitioned %d qubits into %d patches", layout.n, len(patches))
    return patches


def region_distance(layout: LatticeLayout, a, b) -> float:
    """Smallest qubit-to-qubit distance between two regions."""
    ids_a = _ids(a)
    ids_b = _ids(b)
    if ids_a.size == 0 or ids_b.size == 0:
        return math.inf
    return float(layout.distance_to_region(ids_b)[ids_a].min())
