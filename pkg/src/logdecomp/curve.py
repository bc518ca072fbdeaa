"""Genus-weighted graphs, combinatorial types, decorations, contraction and isomorphisms."""

from __future__ import annotations

from collections import Counter, defaultdict
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Any

import attrs
import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher

from .complex import ConeComplex
from .errors import ContractionError, StructuralError
from .linalg import IntMatrix, Vector, dot, express

__all__ = [
    "ClassBeta",
    "CombType",
    "Decoration",
    "DegreeData",
    "Edge",
    "Graph",
    "Leg",
    "LegSpec",
    "TypeIsomorphism",
    "automorphism_count",
    "contract",
    "degree_defect",
    "genus",
    "is_partition",
    "isomorphisms",
    "normalize_legs",
    "total_class",
    "validate_type",
]


@attrs.frozen
class Edge:
    """Bounded edge stored with an orientation ``source → target``."""

    id: str
    source: str
    target: str

    @property
    def is_loop(self) -> bool:
        return self.source == self.target


@attrs.frozen
class Leg:
    id: str
    vertex: str


@attrs.frozen
class Graph:
    """Finite graph with loops and parallel edges allowed; legs keep their order."""

    vertices: tuple[str, ...] = attrs.field(converter=tuple)
    edges: tuple[Edge, ...] = attrs.field(converter=tuple, factory=tuple)
    legs: tuple[Leg, ...] = attrs.field(converter=tuple, factory=tuple)

    def __attrs_post_init__(self) -> None:
        known = set(self.vertices)
        if len(known) != len(self.vertices):
            raise StructuralError("duplicate vertex ids")
        ids = [e.id for e in self.edges] + [leg.id for leg in self.legs]
        if len(set(ids)) != len(ids):
            raise StructuralError("duplicate edge or leg ids")
        for e in self.edges:
            if e.source not in known or e.target not in known:
                raise StructuralError(f"edge {e.id!r} has an unknown endpoint")
        for leg in self.legs:
            if leg.vertex not in known:
                raise StructuralError(f"leg {leg.id!r} is attached to an unknown vertex")

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        for e in self.edges:
            g.add_edge(e.source, e.target, key=e.id)
        return g

    def is_connected(self) -> bool:
        return bool(self.vertices) and nx.is_connected(self.to_networkx())

    def edge(self, edge_id: str) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise StructuralError(f"unknown edge {edge_id!r}")

    def half_edges(self, vertex: str) -> Iterator[tuple[Edge, int]]:
        """Edges at ``vertex`` with sign +1 when oriented away from it; loops appear twice."""
        for e in self.edges:
            if e.source == vertex:
                yield e, 1
            if e.target == vertex:
                yield e, -1

    def legs_at(self, vertex: str) -> list[Leg]:
        return [leg for leg in self.legs if leg.vertex == vertex]


@attrs.frozen
class CombType:
    """Combinatorial type: graph, genus weights, cell assignment and contact orders."""

    graph: Graph
    genera: Mapping[str, int] = attrs.field(converter=dict)
    vertex_cells: Mapping[str, str] = attrs.field(converter=dict)
    edge_cells: Mapping[str, str] = attrs.field(converter=dict, factory=dict)
    leg_cells: Mapping[str, str] = attrs.field(converter=dict, factory=dict)
    edge_u: Mapping[str, Vector] = attrs.field(converter=lambda m: {k: tuple(v) for k, v in dict(m).items()}, factory=dict)
    leg_u: Mapping[str, Vector] = attrs.field(converter=lambda m: {k: tuple(v) for k, v in dict(m).items()}, factory=dict)

    def __attrs_post_init__(self) -> None:
        for v in self.graph.vertices:
            if v not in self.vertex_cells:
                raise StructuralError(f"vertex {v!r} has no cell")
            if self.genera.get(v, 0) < 0:
                raise StructuralError(f"vertex {v!r} has negative genus")
        for e in self.graph.edges:
            if e.id not in self.edge_cells or e.id not in self.edge_u:
                raise StructuralError(f"edge {e.id!r} lacks a cell or contact order")
        for leg in self.graph.legs:
            if leg.id not in self.leg_cells or leg.id not in self.leg_u:
                raise StructuralError(f"leg {leg.id!r} lacks a cell or contact order")

    def genus_of(self, vertex: str) -> int:
        return self.genera.get(vertex, 0)

    def outgoing(self, vertex: str) -> Iterator[tuple[str, str, Vector]]:
        """(id, cell, outgoing contact order) for every edge end and leg at ``vertex``."""
        for e, sign in self.graph.half_edges(vertex):
            yield e.id, self.edge_cells[e.id], tuple(sign * x for x in self.edge_u[e.id])
        for leg in self.graph.legs_at(vertex):
            yield leg.id, self.leg_cells[leg.id], self.leg_u[leg.id]


@attrs.frozen
class Decoration:
    """Curve class per vertex, in the degree group of the vertex's stratum."""

    classes: Mapping[str, Vector] = attrs.field(converter=lambda m: {k: tuple(v) for k, v in dict(m).items()})

    def __getitem__(self, vertex: str) -> Vector:
        return self.classes[vertex]


@attrs.frozen
class DegreeData:
    """User-declared degree groups H₂ per cell with pushforwards.

    ``to_total`` maps a cell's group into H₂(X₀); ``along_faces`` maps the group of
    a bigger cell (smaller stratum) into that of its face. ``divisors`` gives, per
    ray cell r and per cell, the covector A ↦ A·D_r.
    """

    total_rank: int
    groups: Mapping[str, int] = attrs.field(converter=dict, factory=dict)
    to_total: Mapping[str, IntMatrix] = attrs.field(converter=dict, factory=dict)
    along_faces: Mapping[tuple[str, str], IntMatrix] = attrs.field(converter=dict, factory=dict)
    divisors: Mapping[str, Mapping[str, Vector]] = attrs.field(converter=dict, factory=dict)
    uniform: bool = False

    @classmethod
    def uniform_data(cls, total_rank: int) -> DegreeData:
        return cls(total_rank=total_rank, uniform=True)

    def group_rank(self, cell: str) -> int:
        if self.uniform:
            return self.total_rank
        try:
            return self.groups[cell]
        except KeyError as exc:
            raise StructuralError(f"no degree group declared for cell {cell!r}") from exc

    def _check(self, cell: str, vector: Sequence[int]) -> None:
        if len(vector) != self.group_rank(cell):
            raise StructuralError(
                f"class {list(vector)} does not belong to the rank-{self.group_rank(cell)} degree group of {cell!r}"
            )

    def push_total(self, cell: str, vector: Sequence[int]) -> Vector:
        self._check(cell, vector)
        if self.uniform:
            return tuple(vector)
        return tuple(self.to_total[cell].apply(vector))

    def push_face(self, face: str, cell: str, vector: Sequence[int]) -> Vector:
        """Push a class on the stratum of ``cell`` to the (larger) stratum of its face ``face``."""
        self._check(cell, vector)
        if self.uniform or face == cell:
            return tuple(vector)
        matrix = self.along_faces.get((face, cell))
        if matrix is None:
            raise StructuralError(f"no degree pushforward declared from {cell!r} to its face {face!r}")
        return tuple(matrix.apply(vector))


@attrs.frozen
class LegSpec:
    """Contact order of a leg in a class β, as a vector in a cell chart, with an optional point condition."""

    id: str
    cell: str | None
    u: Vector | None
    point: tuple[str, tuple[Fraction, ...]] | None = None


@attrs.frozen
class ClassBeta:
    genus: int
    legs: tuple[LegSpec, ...] = attrs.field(converter=tuple)
    total_class: Vector | None = None


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def genus(t: CombType) -> int:
    """b₁ of the graph plus the sum of genus weights."""
    graph = t.graph
    if not graph.is_connected():
        raise StructuralError("genus is only defined for connected graphs")
    b1 = len(graph.edges) - len(graph.vertices) + 1
    return b1 + sum(t.genus_of(v) for v in graph.vertices)


def total_class(decoration: Decoration, degree: DegreeData, vertex_cells: Mapping[str, str]) -> Vector:
    total = [0] * degree.total_rank
    for vertex, cls in decoration.classes.items():
        pushed = degree.push_total(vertex_cells[vertex], cls)
        total = [a + b for a, b in zip(total, pushed, strict=True)]
    return tuple(total)


def is_partition(t: CombType, decoration: Decoration, total: Sequence[int], degree: DegreeData) -> bool:
    if set(decoration.classes) != set(t.graph.vertices):
        return False
    return total_class(decoration, degree, t.vertex_cells) == tuple(total)


def validate_type(t: CombType, c: ConeComplex) -> list[str]:
    """Problems with a type relative to a complex: incidence, chart lengths, leg contact orders."""
    problems: list[str] = []
    for v, cell in t.vertex_cells.items():
        if cell not in c:
            problems.append(f"vertex {v!r}: unknown cell {cell!r}")
    for e in t.graph.edges:
        cell = t.edge_cells[e.id]
        if cell not in c:
            problems.append(f"edge {e.id!r}: unknown cell {cell!r}")
            continue
        if len(t.edge_u[e.id]) != c.cell(cell).rank:
            problems.append(f"edge {e.id!r}: contact order has the wrong chart length for {cell!r}")
        for end in (e.source, e.target):
            if t.vertex_cells.get(end) in c and not c.is_face(t.vertex_cells[end], cell):
                problems.append(f"edge {e.id!r}: cell of vertex {end!r} is not a face of {cell!r}")
    for leg in t.graph.legs:
        cell = t.leg_cells[leg.id]
        if cell not in c:
            problems.append(f"leg {leg.id!r}: unknown cell {cell!r}")
            continue
        u = t.leg_u[leg.id]
        if len(u) != c.cell(cell).rank:
            problems.append(f"leg {leg.id!r}: contact order has the wrong chart length for {cell!r}")
        elif not c.cell(cell).cone.contains(u):
            problems.append(f"leg {leg.id!r}: contact order lies outside {cell!r}")
        if t.vertex_cells.get(leg.vertex) in c and not c.is_face(t.vertex_cells[leg.vertex], cell):
            problems.append(f"leg {leg.id!r}: cell of vertex {leg.vertex!r} is not a face of {cell!r}")
    return problems


def require_valid_type(t: CombType, c: ConeComplex) -> None:
    problems = validate_type(t, c)
    if problems:
        raise StructuralError("type does not fit the complex", data={"problems": problems})


def _maximal(c: ConeComplex, candidates: Sequence[str]) -> list[str]:
    return [a for a in candidates if not any(b != a and c.is_face(a, b) for b in candidates)]


def contract(
    t: CombType,
    edges: Iterable[str],
    *,
    complex_: ConeComplex,
    decoration: Decoration | None = None,
    degree: DegreeData | None = None,
    target_cells: Mapping[str, str] | None = None,
) -> tuple[CombType, Decoration | None]:
    """Contract bounded edges; merged vertices are named by joining their ids with ``+``."""
    contracted = set(edges)
    graph = t.graph
    for edge_id in contracted:
        graph.edge(edge_id)
    skeleton = nx.MultiGraph()
    skeleton.add_nodes_from(graph.vertices)
    for e in graph.edges:
        if e.id in contracted:
            skeleton.add_edge(e.source, e.target, key=e.id)
    order = {v: i for i, v in enumerate(graph.vertices)}
    fibres = sorted((sorted(comp, key=order.__getitem__) for comp in nx.connected_components(skeleton)), key=lambda f: order[f[0]])

    new_name: dict[str, str] = {}
    vertices: list[str] = []
    genera: dict[str, int] = {}
    cells: dict[str, str] = {}
    classes: dict[str, Vector] = {}
    targets = dict(target_cells or {})
    for fibre in fibres:
        name = fibre[0] if len(fibre) == 1 else "+".join(fibre)
        for v in fibre:
            new_name[v] = name
        vertices.append(name)
        inner = sum(1 for e in graph.edges if e.id in contracted and e.source in fibre)
        genera[name] = sum(t.genus_of(v) for v in fibre) + inner - len(fibre) + 1
        fibre_cells = [t.vertex_cells[v] for v in fibre]
        common = complex_.common_faces(fibre_cells)
        if name in targets:
            chosen = targets[name]
            if chosen not in common:
                raise ContractionError(
                    f"cell {chosen!r} is not a common face of {sorted(set(fibre_cells))}", data={"vertex": name}
                )
        else:
            maximal = _maximal(complex_, common)
            if len(maximal) != 1:
                raise ContractionError(
                    f"vertices {fibre} have no unique maximal common face",
                    data={"vertex": name, "candidates": maximal},
                )
            chosen = maximal[0]
        cells[name] = chosen
        if decoration is not None:
            if degree is None:
                raise StructuralError("contracting a decorated type requires degree data")
            total: list[int] | None = None
            for v in fibre:
                pushed = degree.push_face(chosen, t.vertex_cells[v], decoration[v])
                total = list(pushed) if total is None else [a + b for a, b in zip(total, pushed, strict=True)]
            classes[name] = tuple(total or ())

    kept_edges = [
        Edge(id=e.id, source=new_name[e.source], target=new_name[e.target]) for e in graph.edges if e.id not in contracted
    ]
    legs = [Leg(id=leg.id, vertex=new_name[leg.vertex]) for leg in graph.legs]
    new_type = CombType(
        graph=Graph(vertices=vertices, edges=kept_edges, legs=legs),
        genera=genera,
        vertex_cells=cells,
        edge_cells={e.id: t.edge_cells[e.id] for e in kept_edges},
        leg_cells=dict(t.leg_cells),
        edge_u={e.id: t.edge_u[e.id] for e in kept_edges},
        leg_u=dict(t.leg_u),
    )
    return new_type, (Decoration(classes) if decoration is not None else None)


def normalize_legs(t: CombType, keep: Iterable[str] = ()) -> CombType:
    """Drop legs with zero contact order, except those listed in ``keep``."""
    protected = set(keep)
    legs = [leg for leg in t.graph.legs if leg.id in protected or any(t.leg_u[leg.id])]
    ids = {leg.id for leg in legs}
    return attrs.evolve(
        t,
        graph=Graph(vertices=t.graph.vertices, edges=t.graph.edges, legs=legs),
        leg_cells={k: v for k, v in t.leg_cells.items() if k in ids},
        leg_u={k: v for k, v in t.leg_u.items() if k in ids},
    )


@dataclass(slots=True, frozen=True)
class TypeIsomorphism:
    vertex_map: Mapping[str, str]
    edge_map: Mapping[str, tuple[str, bool]]

    def to_dict(self) -> dict[str, Any]:
        return {
            "vertices": dict(self.vertex_map),
            "edges": {k: {"edge": e, "reversed": r} for k, (e, r) in self.edge_map.items()},
        }


def _negate(u: Vector) -> Vector:
    return tuple(-x for x in u)


def _loop_signature(cell: str, u: Vector) -> tuple[str, Vector]:
    return cell, min(u, _negate(u))


def _collapsed(t: CombType, decoration: Decoration | None) -> nx.Graph:
    graph = t.graph
    leg_index = {leg.id: i for i, leg in enumerate(graph.legs)}
    h = nx.Graph()
    for v in graph.vertices:
        loops = sorted(_loop_signature(t.edge_cells[e.id], t.edge_u[e.id]) for e in graph.edges if e.is_loop and e.source == v)
        legs = tuple((leg_index[leg.id], t.leg_cells[leg.id], t.leg_u[leg.id]) for leg in graph.legs_at(v))
        h.add_node(
            v,
            signature=(
                t.genus_of(v),
                t.vertex_cells[v],
                decoration[v] if decoration is not None else None,
                tuple(loops),
                legs,
            ),
        )
    bundles: dict[frozenset[str], int] = Counter(frozenset((e.source, e.target)) for e in graph.edges if not e.is_loop)
    for pair, size in bundles.items():
        a, b = sorted(pair)
        h.add_edge(a, b, size=size)
    return h


def _bundle_matchings(
    t1: CombType, t2: CombType, phi: Mapping[str, str]
) -> Iterator[dict[str, tuple[str, bool]]]:
    """All edge bijections compatible with a vertex bijection, one bundle at a time."""
    groups: list[list[dict[str, tuple[str, bool]]]] = []
    by_pair1: dict[tuple[str, str], list[Edge]] = defaultdict(list)
    for e in t1.graph.edges:
        key = (e.source, e.target) if e.source <= e.target else (e.target, e.source)
        by_pair1[key].append(e)
    by_pair2: dict[frozenset[str], list[Edge]] = defaultdict(list)
    for e in t2.graph.edges:
        by_pair2[frozenset((e.source, e.target))].append(e)

    for (a, b), edges1 in by_pair1.items():
        edges2 = by_pair2.get(frozenset((phi[a], phi[b])), [])
        if len(edges1) != len(edges2):
            return
        options: list[dict[str, tuple[str, bool]]] = []
        for perm in permutations(edges2):
            choices: list[list[tuple[str, bool]]] = []
            for e1, e2 in zip(edges1, perm, strict=True):
                if t1.edge_cells[e1.id] != t2.edge_cells[e2.id]:
                    break
                u1, u2 = t1.edge_u[e1.id], t2.edge_u[e2.id]
                if e1.is_loop:
                    flips = [flip for flip in (False, True) if u1 == (_negate(u2) if flip else u2)]
                else:
                    reversed_ = phi[e1.source] != e2.source
                    flips = [reversed_] if u1 == (_negate(u2) if reversed_ else u2) else []
                if not flips:
                    break
                choices.append([(e2.id, flip) for flip in flips])
            else:
                for combo in product(*choices):
                    options.append({e1.id: pick for e1, pick in zip(edges1, combo, strict=True)})
        if not options:
            return
        groups.append(options)
    for combo in product(*groups):
        merged: dict[str, tuple[str, bool]] = {}
        for part in combo:
            merged.update(part)
        yield merged


def isomorphisms(
    t1: CombType,
    t2: CombType,
    d1: Decoration | None = None,
    d2: Decoration | None = None,
    *,
    drop_zero_legs: bool = False,
) -> list[TypeIsomorphism]:
    """All isomorphisms of (decorated) types respecting genus, cells, contact orders and leg order."""
    if drop_zero_legs:
        t1, t2 = normalize_legs(t1), normalize_legs(t2)
    g1, g2 = t1.graph, t2.graph
    if (len(g1.vertices), len(g1.edges), len(g1.legs)) != (len(g2.vertices), len(g2.edges), len(g2.legs)):
        return []
    if (d1 is None) != (d2 is None):
        return []
    h1, h2 = _collapsed(t1, d1), _collapsed(t2, d2)
    matcher = GraphMatcher(
        h1,
        h2,
        node_match=lambda a, b: a["signature"] == b["signature"],
        edge_match=lambda a, b: a["size"] == b["size"],
    )
    result: list[TypeIsomorphism] = []
    for mapping in matcher.isomorphisms_iter():
        phi = dict(mapping)
        for edge_map in _bundle_matchings(t1, t2, phi):
            result.append(TypeIsomorphism(vertex_map=phi, edge_map=edge_map))
    return result


def automorphism_count(t: CombType, decoration: Decoration | None = None) -> int:
    return len(isomorphisms(t, t, decoration, decoration))


def degree_defect(
    t: CombType,
    decoration: Decoration,
    degree: DegreeData,
    complex_: ConeComplex,
) -> dict[tuple[str, str], int]:
    """Per (vertex, divisor ray): A(v)·D_r minus the contact of edges and legs at v along r.

    Contacts are read by writing each outgoing contact order in the rays of its
    (simplicial) cell; pairs whose cells are not simplicial are skipped.
    """
    defects: dict[tuple[str, str], int] = {}
    for ray, covectors in sorted(degree.divisors.items()):
        (generator,) = complex_.cell(ray).cone.rays
        for v in t.graph.vertices:
            covector = covectors.get(t.vertex_cells[v])
            if covector is None:
                continue
            expected = dot(covector, decoration[v])
            contact: Fraction | int = 0
            for _, cell, u in t.outgoing(v):
                if not any(u) or not complex_.is_face(ray, cell):
                    continue
                cone = complex_.cell(cell).cone
                if not cone.is_simplicial:
                    break
                image = tuple(complex_.push(ray, cell, generator))
                coords = express(cone.rays, u)
                if coords is None:
                    raise StructuralError(f"contact order {list(u)} lies outside the span of {cell!r}")
                contact += coords[cone.rays.index(image)] if image in cone.rays else 0
            else:
                defects[(v, ray)] = int(expected - contact)
    return defects
