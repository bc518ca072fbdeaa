"""Tropical maps into Δ(X): realizability, moduli polyhedra, rigidity, multiplicities and enumeration."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, permutations, product
from typing import Any

import attrs
import networkx as nx
import structlog

from .complex import BaseMap, ConeComplex, delta_cells, validate_base_map
from .config import get_settings
from .curve import (
    ClassBeta,
    CombType,
    Decoration,
    DegreeData,
    Edge,
    Graph,
    Leg,
    automorphism_count,
    degree_defect,
    is_partition,
    isomorphisms,
    require_valid_type,
)
from .errors import ArgumentError, StructuralError
from .linalg import (
    AffineSolution,
    Inequality,
    QVector,
    Vector,
    common_denominator,
    dot,
    express,
    primitive,
    solve,
    strict_feasible_point,
)

logger = structlog.get_logger("logdecomp.tropmap")


@attrs.frozen
class TargetPoint:
    """A rational point of Δ(X) written in the chart of ``cell``."""

    cell: str
    coords: tuple[Fraction, ...] = attrs.field(converter=lambda xs: tuple(Fraction(x) for x in xs))


@attrs.frozen
class PointConditions:
    """Target points for legs with zero contact order, keyed by leg id."""

    points: Mapping[str, TargetPoint] = attrs.field(converter=dict, factory=dict)

    def normalized(self, complex_: ConeComplex) -> PointConditions:
        """Move every point to the chart of the cell containing it in its relative interior."""
        moved = {}
        for leg, p in self.points.items():
            cell, coords = complex_.locate(p.cell, p.coords)
            moved[leg] = TargetPoint(cell, coords)
        return PointConditions(moved)

    def __bool__(self) -> bool:
        return bool(self.points)


@attrs.frozen
class TropicalMap:
    """A combinatorial type realized by vertex positions (cell charts) and edge lengths."""

    type: CombType
    positions: Mapping[str, tuple[Fraction, ...]] = attrs.field(
        converter=lambda m: {k: tuple(Fraction(x) for x in v) for k, v in dict(m).items()}
    )
    lengths: Mapping[str, Fraction] = attrs.field(converter=lambda m: {k: Fraction(v) for k, v in dict(m).items()})
    decoration: Decoration | None = None
    height: Fraction = attrs.field(default=Fraction(1), converter=Fraction)

    def to_dict(self) -> dict[str, Any]:
        return {
            "positions": {v: list(p) for v, p in self.positions.items()},
            "lengths": dict(self.lengths),
            "height": self.height,
        }


# ---------------------------------------------------------------------------
# Map validation
# ---------------------------------------------------------------------------


@dataclass(slots=True, frozen=True)
class MapViolation:
    condition: str
    element: str
    detail: str


@dataclass(slots=True, frozen=True)
class MapReport:
    violations: tuple[MapViolation, ...]

    @property
    def valid(self) -> bool:
        return not self.violations

    @property
    def first(self) -> MapViolation | None:
        return self.violations[0] if self.violations else None

    def to_dict(self) -> dict[str, Any]:
        return {
            "valid": self.valid,
            "violations": [{"condition": v.condition, "element": v.element, "detail": v.detail} for v in self.violations],
        }


def _position(m: TropicalMap, complex_: ConeComplex, vertex: str) -> tuple[Fraction, ...]:
    cell = m.type.vertex_cells[vertex]
    try:
        pos = m.positions[vertex]
    except KeyError as exc:
        raise StructuralError(f"vertex {vertex!r} has no position") from exc
    if len(pos) != complex_.cell(cell).rank:
        raise StructuralError(
            f"position of vertex {vertex!r} has {len(pos)} coordinates but cell {cell!r} has rank {complex_.cell(cell).rank}",
            data={"vertex": vertex, "cell": cell},
        )
    return pos


def validate_map(m: TropicalMap, complex_: ConeComplex, rho: BaseMap) -> MapReport:
    """Check the realization conditions of a tropical map; violations are reported, not raised."""
    t = m.type
    require_valid_type(t, complex_)
    violations: list[MapViolation] = []
    positions = {v: _position(m, complex_, v) for v in t.graph.vertices}
    for v, pos in positions.items():
        cell = t.vertex_cells[v]
        if rho.value(cell, pos) != m.height:
            violations.append(MapViolation("height", v, f"ρ(pos) = {rho.value(cell, pos)} ≠ {m.height}"))
        if not complex_.cell(cell).cone.in_relative_interior(pos):
            violations.append(MapViolation("vertex-interior", v, f"position is not interior to {cell!r}"))
    for e in t.graph.edges:
        if e.id not in m.lengths:
            raise StructuralError(f"edge {e.id!r} has no length")
        length = m.lengths[e.id]
        cell = t.edge_cells[e.id]
        if length <= 0:
            violations.append(MapViolation("edge-length", e.id, f"length {length} is not positive"))
        start = complex_.push(t.vertex_cells[e.source], cell, positions[e.source])
        end = complex_.push(t.vertex_cells[e.target], cell, positions[e.target])
        u = t.edge_u[e.id]
        if any(b - a != length * x for a, b, x in zip(start, end, u, strict=True)):
            violations.append(MapViolation("edge-segment", e.id, "pos(target) − pos(source) ≠ length·u"))
        midpoint = tuple((a + b) / 2 for a, b in zip(start, end, strict=True))
        if not complex_.cell(cell).cone.in_relative_interior(midpoint):
            violations.append(MapViolation("edge-interior", e.id, f"segment is not interior to {cell!r}"))
    for leg in t.graph.legs:
        cell = t.leg_cells[leg.id]
        u = t.leg_u[leg.id]
        cone = complex_.cell(cell).cone
        if not cone.contains(u):
            violations.append(MapViolation("leg-direction", leg.id, f"contact order is outside {cell!r}"))
            continue
        base = complex_.push(t.vertex_cells[leg.vertex], cell, positions[leg.vertex])
        tip = tuple(a + x for a, x in zip(base, u, strict=True))
        if not cone.in_relative_interior(tip):
            violations.append(MapViolation("leg-interior", leg.id, f"ray is not interior to {cell!r}"))
    return MapReport(tuple(violations))


def balancing_defect(m: TropicalMap, vertex: str, complex_: ConeComplex) -> Vector | None:
    """Sum of outgoing contact orders at ``vertex`` in the smallest cell containing all of them."""
    t = m.type
    outgoing = list(t.outgoing(vertex))
    cells = [t.vertex_cells[vertex], *(cell for _, cell, _ in outgoing)]
    common = complex_.common_cells(cells)
    if not common:
        return None
    target = common[0]
    total = [0] * complex_.cell(target).rank
    for _, cell, u in outgoing:
        pushed = complex_.push(cell, target, u)
        total = [a + int(b) for a, b in zip(total, pushed, strict=True)]
    return tuple(total)


# ---------------------------------------------------------------------------
# Moduli polyhedron and rigidity
# ---------------------------------------------------------------------------


@dataclass(slots=True, frozen=True)
class LinearCondition:
    coeffs: QVector
    rhs: Fraction
    label: str


@dataclass(slots=True)
class ModuliPolyhedron:
    """Equalities and strict conditions on vertex coordinates and edge lengths."""

    variables: tuple[str, ...]
    equalities: tuple[LinearCondition, ...]
    open_conditions: tuple[Inequality, ...]
    empty_reason: str | None = None
    solution: AffineSolution | None = None

    @property
    def dimension(self) -> int:
        """Dimension of the affine solution set of the equalities; −1 when inconsistent."""
        if self.empty_reason is not None:
            return -1
        sol = self.solution
        return -1 if sol is None else sol.dimension

    def interior_point(self) -> QVector | None:
        """A point satisfying all equalities and open conditions, if any."""
        if self.empty_reason is not None:
            return None
        sol = self.solution
        if sol is None:
            return None
        k = sol.dimension
        reduced = []
        for cond in self.open_conditions:
            coeffs = tuple(dot(cond.coeffs, d) for d in sol.directions)
            reduced.append(Inequality(coeffs, cond.rhs - dot(cond.coeffs, sol.point), cond.strict, cond.label))
        params = strict_feasible_point(reduced, k)
        if params is None:
            return None
        return tuple(p + sum((t * d[i] for t, d in zip(params, sol.directions, strict=True)), Fraction(0)) for i, p in enumerate(sol.point))

    def failing(self, point: Sequence[Fraction]) -> list[str]:
        return [c.label for c in self.open_conditions if not c.holds(point)]

    def to_dict(self) -> dict[str, Any]:
        return {
            "variables": list(self.variables),
            "equalities": [{"coeffs": list(c.coeffs), "rhs": c.rhs, "label": c.label} for c in self.equalities],
            "open_conditions": [{"coeffs": list(c.coeffs), "rhs": c.rhs, "label": c.label} for c in self.open_conditions],
            "dimension": self.dimension,
            "empty_reason": self.empty_reason,
        }


class _Layout:
    def __init__(self, t: CombType, complex_: ConeComplex):
        self.offsets: dict[str, int] = {}
        names: list[str] = []
        for v in t.graph.vertices:
            self.offsets[v] = len(names)
            names.extend(f"{v}[{i}]" for i in range(complex_.cell(t.vertex_cells[v]).rank))
        self.length_index: dict[str, int] = {}
        for e in t.graph.edges:
            self.length_index[e.id] = len(names)
            names.append(f"len({e.id})")
        self.names = tuple(names)

    def zeros(self) -> list[Fraction]:
        return [Fraction(0)] * len(self.names)


def moduli_polyhedron(
    t: CombType,
    complex_: ConeComplex,
    rho: BaseMap,
    *,
    points: PointConditions | None = None,
    height: Fraction | int = 1,
) -> ModuliPolyhedron:
    """Equality system and open conditions whose solutions are the tropical maps of type ``t``."""
    complex_.require_simple()
    require_valid_type(t, complex_)
    layout = _Layout(t, complex_)
    cells = t.vertex_cells
    equalities: list[LinearCondition] = []
    opens: list[Inequality] = []
    empty_reason: str | None = None
    h = Fraction(height)

    for v in t.graph.vertices:
        off = layout.offsets[v]
        cell = complex_.cell(cells[v])
        row = layout.zeros()
        for i, c in enumerate(rho[cells[v]]):
            row[off + i] = Fraction(c)
        equalities.append(LinearCondition(tuple(row), h, f"height({v})"))
        for y in cell.cone.facet_normals:
            row = layout.zeros()
            for i, c in enumerate(y):
                row[off + i] = Fraction(c)
            opens.append(Inequality(tuple(row), Fraction(0), True, f"interior({v})"))

    for e in t.graph.edges:
        cell_id = t.edge_cells[e.id]
        cell = complex_.cell(cell_id)
        m1 = complex_.face_map(cells[e.source], cell_id)
        m2 = complex_.face_map(cells[e.target], cell_id)
        u = t.edge_u[e.id]
        li = layout.length_index[e.id]
        rows = []
        for i in range(cell.rank):
            row = layout.zeros()
            for j, c in enumerate(m2.rows[i]):
                row[layout.offsets[e.target] + j] += c
            for j, c in enumerate(m1.rows[i]):
                row[layout.offsets[e.source] + j] -= c
            row[li] -= u[i]
            rows.append(row)
            equalities.append(LinearCondition(tuple(row), Fraction(0), f"segment({e.id})[{i}]"))
        row = layout.zeros()
        row[li] = Fraction(1)
        opens.append(Inequality(tuple(row), Fraction(0), True, f"length({e.id})"))
        for y in cell.cone.facet_normals:
            row = layout.zeros()
            for i, yi in enumerate(y):
                for j, c in enumerate(m1.rows[i]):
                    row[layout.offsets[e.source] + j] += yi * c
                for j, c in enumerate(m2.rows[i]):
                    row[layout.offsets[e.target] + j] += yi * c
            opens.append(Inequality(tuple(row), Fraction(0), True, f"interior({e.id})"))

    constrained = points.normalized(complex_).points if points else {}
    for leg in t.graph.legs:
        cell_id = t.leg_cells[leg.id]
        cone = complex_.cell(cell_id).cone
        u = t.leg_u[leg.id]
        off = layout.offsets[leg.vertex]
        if leg.id in constrained:
            if any(u):
                raise StructuralError(f"leg {leg.id!r} carries a point condition but has nonzero contact order")
            target = constrained[leg.id]
            if target.cell != cells[leg.vertex]:
                empty_reason = (
                    f"point for leg {leg.id!r} lies in cell {target.cell!r} but vertex {leg.vertex!r} is assigned {cells[leg.vertex]!r}"
                )
                continue
            for i, value in enumerate(target.coords):
                row = layout.zeros()
                row[off + i] = Fraction(1)
                equalities.append(LinearCondition(tuple(row), value, f"point({leg.id})[{i}]"))
        if not cone.contains(u):
            empty_reason = f"contact order of leg {leg.id!r} lies outside {cell_id!r}"
            continue
        matrix = complex_.face_map(cells[leg.vertex], cell_id)
        for y in cone.facet_normals:
            row = layout.zeros()
            for i, yi in enumerate(y):
                for j, c in enumerate(matrix.rows[i]):
                    row[off + j] += yi * c
            opens.append(Inequality(tuple(row), Fraction(-dot(y, u)), True, f"interior({leg.id})"))

    for leg_id in constrained:
        if leg_id not in {leg.id for leg in t.graph.legs}:
            raise StructuralError(f"point condition for unknown leg {leg_id!r}")

    n = len(layout.names)
    return ModuliPolyhedron(
        variables=layout.names,
        equalities=tuple(equalities),
        open_conditions=tuple(opens),
        empty_reason=empty_reason,
        solution=solve([c.coeffs for c in equalities], [c.rhs for c in equalities], n),
    )


@dataclass(slots=True, frozen=True)
class RigidityResult:
    rigid: bool
    dimension: int
    reason: str
    witness: TropicalMap | None = None
    direction: Mapping[str, Fraction] | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "rigid": self.rigid,
            "dimension": self.dimension,
            "reason": self.reason,
            "witness": self.witness.to_dict() if self.witness is not None else None,
            "direction": dict(self.direction) if self.direction is not None else None,
        }


def _map_from_point(
    t: CombType, complex_: ConeComplex, point: Sequence[Fraction], decoration: Decoration | None, height: Fraction
) -> TropicalMap:
    layout = _Layout(t, complex_)
    positions = {}
    for v in t.graph.vertices:
        off = layout.offsets[v]
        positions[v] = tuple(point[off : off + complex_.cell(t.vertex_cells[v]).rank])
    lengths = {e.id: point[layout.length_index[e.id]] for e in t.graph.edges}
    return TropicalMap(type=t, positions=positions, lengths=lengths, decoration=decoration, height=height)


def is_rigid(
    t: CombType,
    complex_: ConeComplex,
    rho: BaseMap,
    *,
    points: PointConditions | None = None,
    decoration: Decoration | None = None,
    height: Fraction | int = 1,
) -> RigidityResult:
    """Rigid iff the equality system has exactly one solution and it satisfies every open condition."""
    poly = moduli_polyhedron(t, complex_, rho, points=points, height=height)
    if poly.empty_reason is not None:
        result = RigidityResult(rigid=False, dimension=-1, reason=poly.empty_reason)
    else:
        sol = poly.solution
        if sol is None:
            result = RigidityResult(rigid=False, dimension=-1, reason="equality system is inconsistent")
        elif sol.dimension > 0:
            direction = {name: x for name, x in zip(poly.variables, sol.directions[0], strict=True) if x}
            realizable = poly.interior_point() is not None
            reason = "moves in a positive-dimensional family" if realizable else "no realization satisfies the open conditions"
            result = RigidityResult(rigid=False, dimension=sol.dimension, reason=reason, direction=direction)
        else:
            failing = poly.failing(sol.point)
            if failing:
                result = RigidityResult(
                    rigid=False, dimension=0, reason=f"unique solution violates {', '.join(sorted(set(failing)))}"
                )
            else:
                witness = _map_from_point(t, complex_, sol.point, decoration, Fraction(height))
                result = RigidityResult(rigid=True, dimension=0, reason="unique realization", witness=witness)
    logger.debug("rigidity.checked", vertices=len(t.graph.vertices), rigid=result.rigid, dimension=result.dimension)
    return result


def witness_multiplicity(m: TropicalMap) -> int:
    """Least positive integer clearing every denominator of lengths and vertex coordinates."""
    values: list[Fraction] = [*m.lengths.values()]
    for pos in m.positions.values():
        values.extend(pos)
    return common_denominator(values)


def multiplicity(
    t: CombType,
    complex_: ConeComplex,
    rho: BaseMap,
    *,
    points: PointConditions | None = None,
) -> int:
    result = is_rigid(t, complex_, rho, points=points)
    if not result.rigid or result.witness is None:
        raise ArgumentError("multiplicity is only defined for rigid types", data={"reason": result.reason})
    return witness_multiplicity(result.witness)


# ---------------------------------------------------------------------------
# Decomposition ledger
# ---------------------------------------------------------------------------


@attrs.frozen
class LedgerEntry:
    label: str
    type: CombType
    count: Fraction = attrs.field(converter=Fraction)
    decoration: Decoration | None = None


@dataclass(slots=True, frozen=True)
class LedgerRow:
    label: str
    multiplicity: int
    automorphisms: int
    coefficient: Fraction
    count: Fraction
    contribution: Fraction
    merged: tuple[str, ...] = ()


@dataclass(slots=True, frozen=True)
class Ledger:
    rows: tuple[LedgerRow, ...]
    total: Fraction
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "rows": [
                {
                    "label": r.label,
                    "multiplicity": r.multiplicity,
                    "automorphisms": r.automorphisms,
                    "coefficient": r.coefficient,
                    "count": r.count,
                    "contribution": r.contribution,
                    "merged": list(r.merged),
                }
                for r in self.rows
            ],
            "total": self.total,
            "notes": list(self.notes),
        }


def decomposition_terms(
    entries: Sequence[LedgerEntry],
    complex_: ConeComplex,
    rho: BaseMap,
    *,
    points: PointConditions | None = None,
    total_class: Sequence[int] | None = None,
    degree: DegreeData | None = None,
) -> Ledger:
    """Coefficients m/|Aut| per isomorphism class and the weighted total of the supplied counts."""
    kept: list[tuple[LedgerEntry, list[str]]] = []
    notes: list[str] = []
    for entry in entries:
        duplicate = next(
            (
                (first, merged)
                for first, merged in kept
                if isomorphisms(first.type, entry.type, first.decoration, entry.decoration)
            ),
            None,
        )
        if duplicate is not None:
            first, merged = duplicate
            merged.append(entry.label)
            agree = "equal" if entry.count == first.count else "different"
            notes.append(f"{entry.label!r} is isomorphic to {first.label!r}; merged, keeping the first count ({agree} counts)")
            continue
        kept.append((entry, []))

    rows = []
    total = Fraction(0)
    for entry, merged in kept:
        result = is_rigid(entry.type, complex_, rho, points=points, decoration=entry.decoration)
        if not result.rigid or result.witness is None:
            raise ArgumentError(f"ledger entry {entry.label!r} is not rigid", data={"reason": result.reason})
        if total_class is not None:
            if entry.decoration is None or degree is None:
                raise ArgumentError(f"ledger entry {entry.label!r} needs a decoration and degree data")
            if not is_partition(entry.type, entry.decoration, total_class, degree):
                raise ArgumentError(f"decoration of {entry.label!r} does not partition the total class")
        m = witness_multiplicity(result.witness)
        aut = automorphism_count(entry.type, entry.decoration)
        coefficient = Fraction(m, aut)
        contribution = coefficient * entry.count
        total += contribution
        rows.append(
            LedgerRow(
                label=entry.label,
                multiplicity=m,
                automorphisms=aut,
                coefficient=coefficient,
                count=entry.count,
                contribution=contribution,
                merged=tuple(merged),
            )
        )
    return Ledger(rows=tuple(rows), total=total, notes=tuple(notes))


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


@dataclass(slots=True, frozen=True)
class EnumerationCaps:
    max_vertices: int
    max_edges: int
    max_u: int

    @classmethod
    def from_settings(cls) -> EnumerationCaps:
        settings = get_settings().enumeration
        return cls(settings.max_vertices, settings.max_edges, settings.max_u)


@dataclass(slots=True, frozen=True)
class EnumeratedType:
    type: CombType
    witness: TropicalMap
    multiplicity: int
    automorphisms: int
    decorations: tuple[Decoration, ...] | None = None

    @property
    def class_feasible(self) -> bool | None:
        return None if self.decorations is None else bool(self.decorations)


@dataclass(slots=True, frozen=True)
class Enumeration:
    types: tuple[EnumeratedType, ...]
    examined: int
    caps: EnumerationCaps


def _graph_shapes(k: int, max_edges: int, total_genus: int) -> Iterator[tuple[list[tuple[int, int]], tuple[int, ...]]]:
    pairs = [(i, j) for i in range(k) for j in range(i, k)]
    for n_edges in range(k - 1, max_edges + 1):
        b1 = n_edges - k + 1
        if b1 > total_genus:
            break
        for edges in combinations_with_replacement(pairs, n_edges):
            g = nx.MultiGraph()
            g.add_nodes_from(range(k))
            g.add_edges_from(edges)
            if not nx.is_connected(g):
                continue
            for weights in _compositions(total_genus - b1, k):
                yield list(edges), weights


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


def _canonical_key(t: CombType) -> tuple:
    graph = t.graph
    vertices = list(graph.vertices)
    best = None
    for perm in permutations(range(len(vertices))):
        index = {v: perm[i] for i, v in enumerate(vertices)}
        verts = tuple(sorted((index[v], t.genus_of(v), t.vertex_cells[v]) for v in vertices))
        edges = []
        for e in graph.edges:
            a, b = index[e.source], index[e.target]
            u = t.edge_u[e.id]
            if a == b:
                u = min(u, tuple(-x for x in u))
            elif a > b:
                a, b, u = b, a, tuple(-x for x in u)
            edges.append((a, b, t.edge_cells[e.id], u))
        legs = tuple((index[leg.vertex], t.leg_cells[leg.id], t.leg_u[leg.id]) for leg in graph.legs)
        key = (verts, tuple(sorted(edges)), legs)
        if best is None or key < best:
            best = key
    return best or ()


def _u_vectors(rank: int, cap: int) -> Iterator[Vector]:
    return product(range(-cap, cap + 1), repeat=rank)  # type: ignore[return-value]


def _edge_options(
    complex_: ConeComplex,
    rho: BaseMap,
    cell1: str,
    cell2: str,
    pos1: tuple[Fraction, ...] | None,
    pos2: tuple[Fraction, ...] | None,
    cap: int,
) -> list[tuple[str, Vector]]:
    common = complex_.common_cells([cell1, cell2])
    if not common:
        return []
    options: list[tuple[str, Vector]] = []
    if pos1 is not None and pos2 is not None:
        tau = common[0]
        q1 = complex_.push(cell1, tau, pos1)
        q2 = complex_.push(cell2, tau, pos2)
        midpoint = tuple((a + b) / 2 for a, b in zip(q1, q2, strict=True))
        if not complex_.cell(tau).cone.contains(midpoint):
            return []
        carrier, _ = complex_.locate(tau, midpoint)
        diff = complex_.express_in_face(carrier, tau, tuple(b - a for a, b in zip(q1, q2, strict=True)))
        if not any(diff):
            return [(carrier, tuple(0 for _ in diff))]
        direction = primitive(diff)
        j = 1
        while max(abs(j * x) for x in direction) <= cap:
            options.append((carrier, tuple(j * x for x in direction)))
            j += 1
        return options
    for tau in common:
        covector = rho[tau]
        for u in _u_vectors(complex_.cell(tau).rank, cap):
            if dot(covector, u) != 0:
                continue
            if not any(u) and not (cell1 == cell2 == tau):
                continue
            options.append((tau, tuple(u)))
    return options


def _leg_options(
    complex_: ConeComplex,
    vertex_cell: str,
    pos: tuple[Fraction, ...] | None,
    wanted_cell: str | None,
    wanted_u: Vector | None,
) -> list[tuple[str, Vector]]:
    if wanted_u is None or not any(wanted_u) or wanted_cell is None:
        rank = complex_.cell(vertex_cell).rank
        return [(vertex_cell, tuple(0 for _ in range(rank)))]
    common = complex_.common_cells([vertex_cell, wanted_cell])
    options: list[tuple[str, Vector]] = []
    for tau in common:
        u = tuple(int(x) for x in complex_.push(wanted_cell, tau, wanted_u))
        if pos is not None:
            base = complex_.push(vertex_cell, tau, pos)
            tip = tuple(a + x for a, x in zip(base, u, strict=True))
            carrier, _ = complex_.locate(tau, tip)
            local = complex_.express_in_face(carrier, tau, u)
            return [(carrier, tuple(int(x) for x in local))]
        options.append((tau, u))
    return options


def enumerate_decorations(
    t: CombType,
    total: Sequence[int],
    degree: DegreeData,
    complex_: ConeComplex,
    *,
    bound: int | None = None,
) -> list[Decoration]:
    """Effective per-vertex classes partitioning ``total`` with zero degree defect."""
    limit = bound if bound is not None else max((abs(x) for x in total), default=0)
    vertices = list(t.graph.vertices)
    per_vertex = [list(product(range(limit + 1), repeat=degree.group_rank(t.vertex_cells[v]))) for v in vertices]
    found = []
    for combo in product(*per_vertex):
        decoration = Decoration(dict(zip(vertices, combo, strict=True)))
        if not is_partition(t, decoration, total, degree):
            continue
        if any(degree_defect(t, decoration, degree, complex_).values()):
            continue
        found.append(decoration)
    return found


def enumerate_rigid_types(
    complex_: ConeComplex,
    rho: BaseMap,
    beta: ClassBeta,
    *,
    caps: EnumerationCaps | None = None,
    degree: DegreeData | None = None,
) -> Enumeration:
    """Rigid types of class β within the caps, deduplicated up to isomorphism."""
    caps = caps or EnumerationCaps.from_settings()
    complex_.require_simple()
    validate_base_map(complex_, rho)
    points = PointConditions(
        {want.id: TargetPoint(want.point[0], want.point[1]) for want in beta.legs if want.point is not None}
    ).normalized(complex_)
    candidates_cells = delta_cells(complex_, rho)
    seen: set[tuple] = set()
    found: list[EnumeratedType] = []
    examined = 0

    for k in range(1, caps.max_vertices + 1):
        names = [f"v{i + 1}" for i in range(k)]
        for edges, weights in _graph_shapes(k, caps.max_edges, beta.genus):
            for attachment in product(range(k), repeat=len(beta.legs)):
                pinned: dict[int, tuple[str, tuple[Fraction, ...]]] = {}
                conflict = False
                for want, vi in zip(beta.legs, attachment, strict=True):
                    if want.id in points.points:
                        target = points.points[want.id]
                        current = pinned.get(vi)
                        if current is not None and current != (target.cell, target.coords):
                            conflict = True
                            break
                        pinned[vi] = (target.cell, target.coords)
                if conflict:
                    continue
                cell_choices = [[pinned[i][0]] if i in pinned else candidates_cells for i in range(k)]
                for vertex_cells in product(*cell_choices):
                    positions = [pinned[i][1] if i in pinned else None for i in range(k)]
                    edge_opts = [
                        _edge_options(complex_, rho, vertex_cells[a], vertex_cells[b], positions[a], positions[b], caps.max_u)
                        for a, b in edges
                    ]
                    if any(not opts for opts in edge_opts):
                        continue
                    leg_opts = [
                        _leg_options(complex_, vertex_cells[vi], positions[vi], want.cell, want.u)
                        for want, vi in zip(beta.legs, attachment, strict=True)
                    ]
                    if any(not opts for opts in leg_opts):
                        continue
                    for edge_choice in product(*edge_opts):
                        for leg_choice in product(*leg_opts):
                            t = CombType(
                                graph=Graph(
                                    vertices=names,
                                    edges=[Edge(f"E{i + 1}", names[a], names[b]) for i, (a, b) in enumerate(edges)],
                                    legs=[Leg(want.id, names[vi]) for want, vi in zip(beta.legs, attachment, strict=True)],
                                ),
                                genera=dict(zip(names, weights, strict=True)),
                                vertex_cells=dict(zip(names, vertex_cells, strict=True)),
                                edge_cells={f"E{i + 1}": c for i, (c, _) in enumerate(edge_choice)},
                                edge_u={f"E{i + 1}": u for i, (_, u) in enumerate(edge_choice)},
                                leg_cells={want.id: c for want, (c, _) in zip(beta.legs, leg_choice, strict=True)},
                                leg_u={want.id: u for want, (_, u) in zip(beta.legs, leg_choice, strict=True)},
                            )
                            key = _canonical_key(t)
                            if key in seen:
                                continue
                            seen.add(key)
                            examined += 1
                            result = is_rigid(t, complex_, rho, points=points)
                            if not result.rigid or result.witness is None:
                                continue
                            decorations = None
                            if degree is not None and beta.total_class is not None:
                                decorations = tuple(enumerate_decorations(t, beta.total_class, degree, complex_))
                            found.append(
                                EnumeratedType(
                                    type=t,
                                    witness=result.witness,
                                    multiplicity=witness_multiplicity(result.witness),
                                    automorphisms=automorphism_count(t),
                                    decorations=decorations,
                                )
                            )
    logger.debug("enumeration.finished", examined=examined, rigid=len(found))
    return Enumeration(types=tuple(found), examined=examined, caps=caps)


def point_leg_distribution(t: CombType, point_legs: Iterable[str], counted_legs: Iterable[str]) -> tuple[int, ...]:
    """Number of ``counted_legs`` at the vertex carrying each of ``point_legs``."""
    vertex_of = {leg.id: leg.vertex for leg in t.graph.legs}
    counted = [vertex_of[leg] for leg in counted_legs]
    return tuple(counted.count(vertex_of[p]) for p in point_legs)


def distribution_feasibility(
    enumeration: Enumeration, point_legs: Sequence[str], counted_legs: Sequence[str]
) -> dict[tuple[int, ...], bool]:
    """Per distribution of ``counted_legs`` over the pinned vertices: does some rigid type admit a decoration."""
    verdicts: dict[tuple[int, ...], bool] = {}
    for found in enumeration.types:
        key = point_leg_distribution(found.type, point_legs, counted_legs)
        verdicts[key] = verdicts.get(key, False) or bool(found.class_feasible)
    return dict(sorted(verdicts.items()))
