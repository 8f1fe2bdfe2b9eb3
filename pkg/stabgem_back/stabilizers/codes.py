"""
Stabilizer codes, stabilizer states and the built-in code families.

Toric layout: vertex (i, j) sits at (2i, 2j); the horizontal edge h(i, j)
(id j*L + i) at (2i+1, 2j) and the vertical edge v(i, j) (id L*L + j*L + i) at
(2i, 2j+1). Periods are (2L, 2L) and the lattice spacing is 2.

Honeycomb layout: brick-wall embedding with site (x, y) at id y*Lx + x.
The horizontal link (x, y)-(x+1, y) carries XX when x is even and YY when x is
odd; the vertical link (x, y)-(x, y+1) carries ZZ and exists when x + y is
even. Each hexagon is anchored at a site with x + y even and its generator
is the ordered product of its six link operators.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from . import gf2
from .exceptions import (
    CodeValidationError,
    ConfigurationError,
    InputError,
)
from .geometry import LatticeLayout, translation_map
from .pauli import (
    GroupBasis,
    PauliOperator,
    express_in_generators,
    product,
    region_ids,
    symplectic_matrix,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CodeParams:
    """Logical count, distance (with where it came from) and generator diameter."""

    k: int
    d: int | None
    w: float
    d_provenance: str = "unknown"

    def as_dict(self) -> dict:
        return {"k": self.k, "d": self.d, "w": self.w, "d_provenance": self.d_provenance}


@dataclass(frozen=True)
class Link:
    """Two-body link term kind_a kind_b of the honeycomb model."""

    a: int
    b: int
    kind: str

    def touches(self, site: int) -> bool:
        return site in (self.a, self.b)

    def other(self, site: int) -> int:
        return self.b if site == self.a else self.a


def commutation_violations(generators: Sequence[PauliOperator]) -> list[tuple[int, int]]:
    """Index pairs of generators that anticommute, found through shared qubits."""
    incidence: dict[int, list[int]] = {}
    for index, gen in enumerate(generators):
        for q in gen.support:
            incidence.setdefault(int(q), []).append(index)
    checked: set[tuple[int, int]] = set()
    bad: list[tuple[int, int]] = []
    for members in incidence.values():
        for pos, i in enumerate(members):
            for j in members[pos + 1 :]:
                if (i, j) in checked:
                    continue
                checked.add((i, j))
                gi, gj = generators[i], generators[j]
                if int((np.dot(gi.x, gj.z) + np.dot(gi.z, gj.x)) % 2):
                    bad.append((i, j))
    return sorted(bad)


class StabilizerCode:
    """
    Commuting generator list on a planar layout.

    Built-in families pass `independent` (indices of a known independent
    subset) and `logicals` so large instances skip the generic elimination.
    """

    def __init__(
        self,
        generators: Sequence[PauliOperator],
        layout: LatticeLayout,
        name: str = "custom",
        metadata: dict | None = None,
        distance: int | None = None,
        distance_provenance: str | None = None,
        independent: Sequence[int] | None = None,
        logicals: Sequence[tuple[PauliOperator, PauliOperator]] | None = None,
        validate: bool = True,
    ):
        generators = list(generators)
        if not generators:
            raise CodeValidationError("a code needs at least one generator", {"generators": []})
        n = generators[0].n
        for index, gen in enumerate(generators):
            if gen.n != n:
                raise CodeValidationError(
                    f"generator {index} acts on {gen.n} qubits, expected {n}",
                    {"generators": [index]},
                )
            if not gen.is_hermitian:
                raise CodeValidationError(
                    f"generator {index} is not Hermitian", {"generators": [index]}
                )
        if layout.n != n:
            raise CodeValidationError(
                f"layout has {layout.n} qubits, generators act on {n}", {"qubits": [layout.n, n]}
            )
        if validate:
            violations = commutation_violations(generators)
            if violations:
                i, j = violations[0]
                raise CodeValidationError(
                    f"generators {i} and {j} anticommute",
                    {"generators": [i, j], "pairs": [list(p) for p in violations]},
                )
        self.generators: tuple[PauliOperator, ...] = tuple(generators)
        self.layout = layout
        self.name = name
        self.metadata = dict(metadata or {})
        self._distance = distance
        self._distance_provenance = distance_provenance or ("declared" if distance else "unknown")
        self._independent = tuple(independent) if independent is not None else None
        self.known_logicals = tuple(logicals) if logicals is not None else None
        self._translations: dict[tuple[float, ...], np.ndarray | None] = {}

    @property
    def n(self) -> int:
        return self.generators[0].n

    @property
    def family(self) -> str:
        return self.metadata.get("family", self.name)

    @cached_property
    def matrix(self) -> np.ndarray:
        return symplectic_matrix(self.generators)

    @cached_property
    def basis_indices(self) -> tuple[int, ...]:
        """Generator indices that make up `basis`, lowest indices first."""
        if self._independent is not None:
            return self._independent
        return tuple(gf2.independent_rows(self.matrix))

    @cached_property
    def basis(self) -> GroupBasis:
        basis = GroupBasis([self.generators[i] for i in self.basis_indices], n=self.n)
        if self._independent is None:
            kept = set(self.basis_indices)
            for index, gen in enumerate(self.generators):
                if index in kept:
                    continue
                decomposition = express_in_generators(basis, gen)
                if decomposition is None or not decomposition.sign_matches:
                    raise CodeValidationError(
                        f"generator {index} is the negative of a product of the others",
                        {"generators": [index]},
                    )
        return basis

    @property
    def rank(self) -> int:
        return len(self.basis_indices)

    @property
    def k(self) -> int:
        return self.n - self.rank

    @cached_property
    def supports(self) -> tuple[np.ndarray, ...]:
        return tuple(g.support for g in self.generators)

    @cached_property
    def incidence(self) -> tuple[tuple[int, ...], ...]:
        """For every qubit, the generators acting on it."""
        per_qubit: list[list[int]] = [[] for _ in range(self.n)]
        for index, support in enumerate(self.supports):
            for q in support:
                per_qubit[int(q)].append(index)
        return tuple(tuple(v) for v in per_qubit)

    @cached_property
    def w(self) -> float:
        """Largest generator diameter."""
        return max(self.layout.diameter(s) for s in self.supports)

    def distance(self) -> int | None:
        return self._distance

    @property
    def distance_provenance(self) -> str:
        return self._distance_provenance

    def declare_distance(self, d: int, provenance: str = "declared") -> None:
        self._distance = int(d)
        self._distance_provenance = provenance

    @property
    def params(self) -> CodeParams:
        return CodeParams(self.k, self._distance, self.w, self._distance_provenance)

    def touching(self, region) -> list[int]:
        """Generators whose support meets `region`."""
        found: set[int] = set()
        for q in region_ids(region):
            found.update(self.incidence[int(q)])
        return sorted(found)

    def inside(self, region) -> list[int]:
        """Generators whose support lies in `region`."""
        ids = set(int(q) for q in region_ids(region))
        return [i for i in self.touching(region) if set(int(q) for q in self.supports[i]) <= ids]

    def local_basis(self, indices: Iterable[int]) -> GroupBasis:
        return GroupBasis.from_generators([self.generators[i] for i in indices], n=self.n)

    def translation(self, shift) -> np.ndarray | None:
        """
        Qubit image of the translation by `shift` when it maps the layout
        onto itself and the stabilizer group onto itself, else None.
        """
        key = tuple(round(float(v), 6) for v in shift)
        if key not in self._translations:
            image = translation_map(self.layout, key)
            if image is not None:
                moved = {g.permuted(image) for g in self.generators}
                if moved != set(self.generators) and not all(self.basis.contains(g) for g in moved):
                    image = None
            self._translations[key] = image
        return self._translations[key]

    def same_as(self, other: StabilizerCode) -> bool:
        """Structural equality: generators, positions and periods."""
        return (
            self.n == other.n
            and self.generators == other.generators
            and np.allclose(self.layout.positions, other.layout.positions)
            and self.layout.periods == other.layout.periods
        )

    def __repr__(self) -> str:
        return f"<StabilizerCode {self.name} n={self.n} generators={len(self.generators)}>"


class MixedStabilizerState:
    """rho proportional to the projector onto the +1 space of `group`."""

    def __init__(self, group: GroupBasis, label: str = ""):
        self.group = group
        self.label = label

    @property
    def n(self) -> int:
        return self.group.n

    @property
    def rank(self) -> int:
        return self.group.rank

    @property
    def is_pure(self) -> bool:
        return self.group.is_pure

    @property
    def normalization(self) -> float:
        return 2.0 ** (self.rank - self.n)

    @property
    def purity(self) -> float:
        return self.normalization

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.label or '-'} n={self.n} rank={self.rank}>"


class StabilizerState(MixedStabilizerState):
    """Pure stabilizer state: a full-rank group."""

    def __init__(self, group: GroupBasis, label: str = ""):
        if not group.is_pure:
            raise InputError(f"a pure state needs rank {group.n}, got {group.rank}")
        super().__init__(group, label)


# ----------------------------------------------------------------------
# Built-in families
# ----------------------------------------------------------------------


def toric_layout(L: int) -> LatticeLayout:
    positions = np.zeros((2 * L * L, 2))
    for j in range(L):
        for i in range(L):
            positions[j * L + i] = (2 * i + 1, 2 * j)
            positions[L * L + j * L + i] = (2 * i, 2 * j + 1)
    return LatticeLayout(positions, periods=(2 * L, 2 * L), spacing=2.0)


def make_toric(L: int) -> StabilizerCode:
    """Kitaev's toric code on an L x L torus: stars first, then plaquettes."""
    if L < 2:
        raise ConfigurationError(f"toric code needs L >= 2, got {L}")
    n = 2 * L * L

    def h(i: int, j: int) -> int:
        return (j % L) * L + (i % L)

    def v(i: int, j: int) -> int:
        return L * L + (j % L) * L + (i % L)

    stars = [
        PauliOperator.on_qubits(n, [h(i, j), h(i - 1, j), v(i, j), v(i, j - 1)], "X")
        for j in range(L)
        for i in range(L)
    ]
    plaquettes = [
        PauliOperator.on_qubits(n, [h(i, j), h(i, j + 1), v(i, j), v(i + 1, j)], "Z")
        for j in range(L)
        for i in range(L)
    ]
    generators = stars + plaquettes
    # the last star and the last plaquette are the products of the others
    independent = [i for i in range(2 * L * L) if i not in (L * L - 1, 2 * L * L - 1)]
    logicals = [
        (
            PauliOperator.on_qubits(n, [h(i, 0) for i in range(L)], "Z"),
            PauliOperator.on_qubits(n, [h(0, j) for j in range(L)], "X"),
        ),
        (
            PauliOperator.on_qubits(n, [v(0, j) for j in range(L)], "Z"),
            PauliOperator.on_qubits(n, [v(i, 0) for i in range(L)], "X"),
        ),
    ]
    code = StabilizerCode(
        generators,
        toric_layout(L),
        name=f"toric-L{L}",
        metadata={"family": "toric", "L": L},
        distance=L,
        distance_provenance="family",
        independent=independent,
        logicals=logicals,
        validate=L <= 8,
    )
    logger.debug("built toric code L=%d (n=%d)", L, n)
    return code


def _check_honeycomb_dims(Lx: int, Ly: int) -> None:
    if Lx < 2 or Ly < 2 or Lx % 2 or Ly % 2:
        raise ConfigurationError(f"honeycomb torus needs even Lx, Ly >= 2, got {Lx}x{Ly}")


def honeycomb_link_list(Lx: int, Ly: int) -> list[Link]:
    _check_honeycomb_dims(Lx, Ly)
    links: list[Link] = []
    for y in range(Ly):
        for x in range(Lx):
            a = y * Lx + x
            b = y * Lx + (x + 1) % Lx
            links.append(Link(a, b, "X" if x % 2 == 0 else "Y"))
    for y in range(Ly):
        for x in range(Lx):
            if (x + y) % 2 == 0:
                links.append(Link(y * Lx + x, ((y + 1) % Ly) * Lx + x, "Z"))
    return links


def honeycomb_links(code: StabilizerCode) -> list[Link]:
    """All link terms of a honeycomb code, horizontal links first."""
    if code.metadata.get("family") != "honeycomb":
        raise InputError(f"{code.name} is not a honeycomb code")
    return honeycomb_link_list(int(code.metadata["Lx"]), int(code.metadata["Ly"]))


def link_operator(n: int, link: Link) -> PauliOperator:
    if link.a == link.b:
        raise InputError("a link joins two distinct sites")
    return PauliOperator.from_terms(n, {link.a: link.kind, link.b: link.kind})


def hexagon_links(Lx: int, Ly: int, x: int, y: int) -> list[Link]:
    """The six links around the hexagon anchored at (x, y), in cycle order."""
    site = lambda px, py: (py % Ly) * Lx + (px % Lx)  # noqa: E731
    kind = lambda px: "X" if px % 2 == 0 else "Y"  # noqa: E731
    return [
        Link(site(x, y), site(x + 1, y), kind(x)),
        Link(site(x + 1, y), site(x + 2, y), kind(x + 1)),
        Link(site(x + 2, y), site(x + 2, y + 1), "Z"),
        Link(site(x + 2, y + 1), site(x + 1, y + 1), kind(x + 1)),
        Link(site(x + 1, y + 1), site(x, y + 1), kind(x)),
        Link(site(x, y + 1), site(x, y), "Z"),
    ]


def make_honeycomb_fermion(Lx: int, Ly: int) -> StabilizerCode:
    """Hexagon stabilizers S_hex on a brick-wall honeycomb torus."""
    _check_honeycomb_dims(Lx, Ly)
    n = Lx * Ly
    anchors = [(x, y) for y in range(Ly) for x in range(Lx) if (x + y) % 2 == 0]
    generators = [
        product(link_operator(n, link) for link in hexagon_links(Lx, Ly, x, y))
        for x, y in anchors
    ]
    positions = [(x, y) for y in range(Ly) for x in range(Lx)]
    code = StabilizerCode(
        generators,
        LatticeLayout(positions, periods=(Lx, Ly), spacing=1.0),
        name=f"honeycomb-{Lx}x{Ly}",
        metadata={"family": "honeycomb", "Lx": Lx, "Ly": Ly, "anchors": anchors},
        distance=2,
        distance_provenance="family",
        # the hexagons multiply to the identity; all but the last are independent
        independent=list(range(len(generators) - 1)),
    )
    logger.debug("built honeycomb code %dx%d (n=%d)", Lx, Ly, n)
    return code


def chain_layout(n: int) -> LatticeLayout:
    return LatticeLayout([(float(j), 0.0) for j in range(n)], periods=None, spacing=1.0)


def make_ghz_state(n: int) -> StabilizerState:
    """(|0...0> + |1...1>)/sqrt(2): stabilized by Z_j Z_{j+1} and X...X."""
    if n < 2:
        raise ConfigurationError(f"GHZ state needs n >= 2, got {n}")
    rows = [PauliOperator.on_qubits(n, [j, j + 1], "Z") for j in range(n - 1)]
    rows.append(PauliOperator.on_qubits(n, range(n), "X"))
    return StabilizerState(GroupBasis(rows), label=f"ghz-{n}")


def ghz_code(n: int) -> StabilizerCode:
    """The GHZ stabilizers as a (k = 0) code on an open chain."""
    state = make_ghz_state(n)
    return StabilizerCode(
        state.group.rows,
        chain_layout(n),
        name=f"ghz-{n}",
        metadata={"family": "ghz", "n": n},
        independent=list(range(n)),
    )


def symmetric_mixed_state(code: StabilizerCode) -> MixedStabilizerState:
    """Maximally mixed state on the common +1 space of the code generators."""
    return MixedStabilizerState(code.basis, label=f"symmetric-{code.name}")


_PRODUCT_TOKENS = {"+Z": ("Z", 0), "-Z": ("Z", 2), "+X": ("X", 0), "-X": ("X", 2), "+Y": ("Y", 0), "-Y": ("Y", 2)}


def product_state(labels: Sequence[str]) -> StabilizerState:
    """Tensor product of single-qubit Pauli eigenstates, e.g. ["+Z", "-X"]."""
    n = len(labels)
    if n == 0:
        raise InputError("product state needs at least one qubit")
    rows = []
    for q, token in enumerate(labels):
        try:
            letter, phase = _PRODUCT_TOKENS[token]
        except KeyError as exc:
            raise InputError(f"unknown single-qubit eigenstate {token!r}") from exc
        rows.append(PauliOperator.from_terms(n, {q: letter}, phase))
    return StabilizerState(GroupBasis(rows), label="product")


def zero_state(n: int) -> StabilizerState:
    """|0...0>."""
    state = product_state(["+Z"] * n)
    state.label = f"zero-{n}"
    return state


def dressed_code(
    code: StabilizerCode,
    generators: Sequence[PauliOperator],
    logicals: Sequence[tuple[PauliOperator, PauliOperator]] | None,
    suffix: str,
) -> StabilizerCode:
    """Same layout and bookkeeping with conjugated generators and logicals."""
    return StabilizerCode(
        generators,
        code.layout,
        name=f"{code.name}-{suffix}",
        metadata={**code.metadata, "dressed": suffix},
        distance=code.distance(),
        distance_provenance=code.distance_provenance,
        independent=code._independent,
        logicals=logicals,
        validate=False,
    )


# ----------------------------------------------------------------------
# Files
# ----------------------------------------------------------------------


def code_from_data(data: dict) -> StabilizerCode:
    """Build a code from validated code-file data."""
    n = data["n"]
    positions = np.zeros((n, 2))
    for qubit in data["qubits"]:
        positions[qubit["id"]] = (qubit["x"], qubit["y"])
    periods = data.get("periods")
    metadata = dict(data.get("metadata") or {})
    spacing = float(metadata.get("spacing", 1.0))
    generators = [
        PauliOperator.from_label(g["pauli"]).with_phase(0 if g["sign"] == "+1" else 2)
        for g in data["generators"]
    ]
    distance = metadata.get("distance")
    return StabilizerCode(
        generators,
        LatticeLayout(positions, periods=tuple(periods) if periods else None, spacing=spacing),
        name=metadata.get("name", "loaded"),
        metadata=metadata,
        distance=int(distance) if distance is not None else None,
        distance_provenance="declared" if distance is not None else None,
    )


def code_to_data(code: StabilizerCode) -> dict:
    metadata = {
        key: value for key, value in code.metadata.items() if key not in ("anchors", "dressed")
    }
    metadata.setdefault("name", code.name)
    metadata.setdefault("spacing", code.layout.spacing)
    if code.distance() is not None:
        metadata.setdefault("distance", code.distance())
    return {
        "version": 1,
        "n": code.n,
        "qubits": [
            {"id": q, "x": float(x), "y": float(y)}
            for q, (x, y) in enumerate(code.layout.positions.tolist())
        ],
        "periods": list(code.layout.periods) if code.layout.periods is not None else None,
        "generators": [
            {"pauli": g.pauli_string, "sign": "+1" if g.phase == 0 else "-1"}
            for g in code.generators
        ],
        "metadata": metadata,
    }


def load_code(path: str | Path) -> StabilizerCode:
    """Read and validate a JSON code file."""
    from .serializers import CodeFileSerializer

    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read code file {path}: {exc}") from exc
    serializer = CodeFileSerializer(data=raw)
    if not serializer.is_valid():
        raise CodeValidationError(f"invalid code file {path}", serializer.errors)
    code = code_from_data(serializer.validated_data)
    code.basis  # noqa: B018  sign consistency of redundant generators
    logger.info("loaded %s from %s", code, path)
    return code


def save_code(code: StabilizerCode, path: str | Path) -> None:
    from .serializers import CodeFileSerializer

    data = CodeFileSerializer(code_to_data(code)).data
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    logger.info("saved %s to %s", code, path)


def build_code(family: str, **options) -> StabilizerCode:
    """Construct a built-in family from command-line style options."""
    if family == "toric":
        return make_toric(int(options.get("L") or 4))
    if family == "honeycomb":
        return make_honeycomb_fermion(int(options.get("Lx") or 4), int(options.get("Ly") or 4))
    if family == "ghz":
        return ghz_code(int(options.get("n") or 4))
    raise ConfigurationError(f"unknown code family {family!r}")


def hermitian(p: PauliOperator) -> PauliOperator:
    """p or i*p, whichever is Hermitian."""
    return p if p.is_hermitian else p.with_phase(p.phase + 1)

