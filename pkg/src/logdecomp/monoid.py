"""Basic monoids of combinatorial types, canonical comparison maps and fibre tropicalization."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Any

import attrs
import networkx as nx
import structlog

from .complex import BaseMap, ConeComplex
from .curve import CombType, contract
from .errors import ArgumentError, StructuralError
from .lattice import Cone, Lattice, MonoidHom, ToricMonoid, dual_cone, hilbert_basis
from .linalg import (
    IntMatrix,
    QVector,
    Vector,
    dot,
    express,
    integer_kernel,
    inverse,
    nullspace,
    primitive,
    rank,
    saturated_basis,
)
from .tropmap import TropicalMap

logger = structlog.get_logger("logdecomp.monoid")


# ---------------------------------------------------------------------------
# The dual cone Q∨
# ---------------------------------------------------------------------------


@dataclass(slots=True, frozen=True)
class BasicDual:
    """Q∨: tuples of vertex positions and edge lengths solving the edge equations.

    ``basis`` is a ℤ-basis (in the ambient variables) of the lattice spanned by
    the cone; ``cone`` is Q∨ written in ``basis`` coordinates, full-dimensional.
    """

    type: CombType
    variables: tuple[str, ...]
    offsets: Mapping[str, int]
    widths: Mapping[str, int]
    length_index: Mapping[str, int]
    equations: tuple[Vector, ...]
    basis: tuple[Vector, ...]
    cone: Cone

    @property
    def rank(self) -> int:
        return len(self.basis)

    def ambient(self, x: Sequence[int | Fraction]) -> tuple:
        """Ambient vector of a point given in ``basis`` coordinates."""
        return tuple(sum((c * b[i] for c, b in zip(x, self.basis, strict=True)), 0) for i in range(len(self.variables)))

    def coordinates(self, ambient: Sequence[int | Fraction]) -> QVector | None:
        return express(self.basis, ambient) if self.basis else (() if not any(ambient) else None)

    def block(self, vertex: str, x: Sequence[int | Fraction]) -> tuple:
        """Position of ``vertex`` at the point ``x`` of Q∨."""
        point = self.ambient(x)
        off = self.offsets[vertex]
        return point[off : off + self.widths[vertex]]

    def length(self, edge: str, x: Sequence[int | Fraction]) -> int | Fraction:
        return self.ambient(x)[self.length_index[edge]]

    def to_dict(self) -> dict[str, Any]:
        return {
            "variables": list(self.variables),
            "equations": [list(row) for row in self.equations],
            "lattice_basis": [list(b) for b in self.basis],
            "rays": [list(self.ambient(r)) for r in self.cone.rays],
            "dimension": self.rank,
        }


def _extreme_rays(rows: Sequence[Vector], k: int) -> list[Vector]:
    """Extreme rays of the pointed cone {x ∈ ℝ^k : row·x ≥ 0 for every row}."""
    if k == 0:
        return []
    constraints = sorted({primitive(r) for r in rows if any(r)})
    if rank(constraints, k) < k:
        raise StructuralError("cone of tropical curves contains a line")
    rays: set[Vector] = set()
    for subset in combinations(constraints, k - 1):
        if rank(subset, k) != k - 1:
            continue
        (direction,) = nullspace(list(subset), k)
        d = primitive(direction)
        for candidate in (d, tuple(-x for x in d)):
            if all(dot(r, candidate) >= 0 for r in constraints):
                rays.add(candidate)
    return sorted(rays)


def basic_dual(t: CombType, complex_: ConeComplex) -> BasicDual:
    """Cone of tropical curves of type ``t`` with its lattice: V(v₂) − V(v₁) = e_q·u_q for every edge."""
    complex_.require_simple()
    cells = t.vertex_cells
    offsets: dict[str, int] = {}
    widths: dict[str, int] = {}
    names: list[str] = []
    for v in t.graph.vertices:
        offsets[v] = len(names)
        widths[v] = complex_.cell(cells[v]).rank
        names.extend(f"V({v})[{i}]" for i in range(complex_.cell(cells[v]).rank))
    length_index: dict[str, int] = {}
    for e in t.graph.edges:
        length_index[e.id] = len(names)
        names.append(f"e({e.id})")
    n = len(names)

    equations: list[Vector] = []
    for e in t.graph.edges:
        cell_id = t.edge_cells[e.id]
        m1 = complex_.face_map(cells[e.source], cell_id)
        m2 = complex_.face_map(cells[e.target], cell_id)
        u = t.edge_u[e.id]
        for i in range(complex_.cell(cell_id).rank):
            row = [0] * n
            for j, c in enumerate(m2.rows[i]):
                row[offsets[e.target] + j] += c
            for j, c in enumerate(m1.rows[i]):
                row[offsets[e.source] + j] -= c
            row[length_index[e.id]] -= u[i]
            if any(row):
                equations.append(tuple(row))

    inequalities: list[Vector] = []
    for v in t.graph.vertices:
        for y in complex_.cell(cells[v]).cone.facet_normals:
            row = [0] * n
            for i, c in enumerate(y):
                row[offsets[v] + i] = c
            inequalities.append(tuple(row))
    for index in length_index.values():
        row = [0] * n
        row[index] = 1
        inequalities.append(tuple(row))

    kernel = integer_kernel(IntMatrix.from_rows(equations, ncols=n)) if equations else list(IntMatrix.identity(n).rows)
    k = len(kernel)
    local_rows = [tuple(dot(g, kv) for kv in kernel) for g in inequalities]
    rays_k = _extreme_rays(local_rows, k)
    span = saturated_basis(rays_k, k)
    basis = [tuple(sum(c * kv[i] for c, kv in zip(w, kernel, strict=True)) for i in range(n)) for w in span]
    d = len(basis)
    local_rays = []
    for r in rays_k:
        coords = express(span, r)
        if coords is None:
            raise ArithmeticError("extreme ray outside its own span")
        local_rays.append(tuple(int(c) for c in coords))
    cone = Cone.from_generators(d, local_rays)
    logger.debug("monoid.basic_dual", variables=n, kernel=k, dimension=d, rays=len(local_rays))
    return BasicDual(
        type=t,
        variables=tuple(names),
        offsets=offsets,
        widths=widths,
        length_index=length_index,
        equations=tuple(equations),
        basis=tuple(basis),
        cone=cone,
    )


# ---------------------------------------------------------------------------
# Q itself
# ---------------------------------------------------------------------------


@dataclass(slots=True, frozen=True)
class BasicMonoid:
    """Q = Hom(Q∨, ℕ) in the coordinates dual to ``dual.basis``.

    ``base_map`` is the element of Q induced by ρ (the height functional on Q∨).
    When Q is free, ``base_coefficients`` writes it in Q's generators, which are
    ordered so that generators with nonzero height come first.
    """

    dual: BasicDual
    monoid: ToricMonoid
    base_map: Vector | None
    base_coefficients: Vector | None

    @property
    def is_free(self) -> bool:
        return self.monoid.is_free

    def to_dict(self) -> dict[str, Any]:
        return {
            "dual": self.dual.to_dict(),
            "rank": self.monoid.rank,
            "free": self.is_free,
            "generators": [list(g) for g in self.monoid.generators],
            "base_map": list(self.base_map) if self.base_map is not None else None,
            "base_coefficients": list(self.base_coefficients) if self.base_coefficients is not None else None,
        }


def _height_functional(dual: BasicDual, complex_: ConeComplex, rho: BaseMap) -> Vector:
    t = dual.type
    for e in t.graph.edges:
        if dot(rho[t.edge_cells[e.id]], t.edge_u[e.id]) != 0:
            raise StructuralError(f"edge {e.id!r} changes height: ρ(u) ≠ 0", data={"edge": e.id})
    v0 = t.graph.vertices[0]
    covector = rho[t.vertex_cells[v0]]
    off = dual.offsets[v0]
    return tuple(int(dot(covector, b[off : off + len(covector)])) for b in dual.basis)


def basic_monoid(
    t: CombType,
    complex_: ConeComplex,
    rho: BaseMap | None = None,
    *,
    rank_cap: int | None = None,
) -> BasicMonoid:
    """Dualize Q∨; free Q is read off a unimodular simplicial Q∨ without Hilbert bases."""
    dual = basic_dual(t, complex_)
    d = dual.rank
    height = _height_functional(dual, complex_, rho) if rho is not None else None
    cone = dual.cone
    if cone.is_simplicial and cone.is_unimodular():
        rays = sorted(cone.rays, key=lambda r: (-(dot(height, r) if height is not None else 0), r))
        dual_rows = inverse(IntMatrix.from_columns(rays, d)) if d else []
        generators = [tuple(int(c) for c in row) for row in dual_rows]
        monoid = ToricMonoid(
            lattice=Lattice(d),
            generators=tuple(generators),
            group_basis=tuple(generators),
            cone=Cone.from_generators(d, generators) if d else Cone.from_generators(0, []),
        )
        coefficients = tuple(int(dot(height, r)) for r in rays) if height is not None else None
    else:
        q_cone = dual_cone(cone)
        generators = list(hilbert_basis(q_cone, IntMatrix.identity(d).rows, rank_cap=rank_cap))
        monoid = ToricMonoid(
            lattice=q_cone.lattice,
            generators=tuple(sorted(generators)),
            group_basis=tuple(IntMatrix.identity(d).rows),
            cone=q_cone,
        )
        coefficients = None
    logger.debug("monoid.basic", rank=d, free=monoid.is_free)
    return BasicMonoid(dual=dual, monoid=monoid, base_map=height, base_coefficients=coefficients)


# ---------------------------------------------------------------------------
# Skeletons of log maps
# ---------------------------------------------------------------------------


@attrs.frozen
class LogMapSkeleton:
    """Monoid data of a log map over a log point with base monoid ``base``.

    ``vertex_maps[v]`` (base rank × rank σ(v)) sends P_v = σ(v)∨ into the base;
    ``node_elements[q]`` is ρ_q; ``base_element`` is the image of 1 ∈ ℕ when known.
    """

    type: CombType
    base: ToricMonoid
    vertex_maps: Mapping[str, IntMatrix] = attrs.field(converter=dict)
    node_elements: Mapping[str, Vector] = attrs.field(converter=lambda m: {k: tuple(v) for k, v in dict(m).items()})
    base_element: Vector | None = None


def basic_skeleton(t: CombType, complex_: ConeComplex, rho: BaseMap | None = None) -> LogMapSkeleton:
    """The universal skeleton over Q."""
    basic = basic_monoid(t, complex_, rho)
    dual = basic.dual
    vertex_maps = {}
    for v in t.graph.vertices:
        r = complex_.cell(t.vertex_cells[v]).rank
        off = dual.offsets[v]
        vertex_maps[v] = IntMatrix.from_rows([b[off : off + r] for b in dual.basis], ncols=r)
    node_elements = {e.id: tuple(b[dual.length_index[e.id]] for b in dual.basis) for e in t.graph.edges}
    return LogMapSkeleton(
        type=t, base=basic.monoid, vertex_maps=vertex_maps, node_elements=node_elements, base_element=basic.base_map
    )


def evaluation_skeleton(basic: BasicMonoid, point: Sequence[int]) -> LogMapSkeleton:
    """Skeleton over ℕ obtained by evaluating Q at an integral point of Q∨ (basis coordinates)."""
    dual = basic.dual
    if not dual.cone.contains(point):
        raise ArgumentError(f"point {list(point)} is not in Q∨")
    ambient = dual.ambient(point)
    t = dual.type
    vertex_maps = {}
    for v in t.graph.vertices:
        vertex_maps[v] = IntMatrix.from_rows([dual.block(v, point)], ncols=dual.widths[v])
    node_elements = {e.id: (ambient[dual.length_index[e.id]],) for e in t.graph.edges}
    base_element = (int(dot(basic.base_map, point)),) if basic.base_map is not None else None
    return LogMapSkeleton(
        type=t,
        base=ToricMonoid.free(1),
        vertex_maps=vertex_maps,
        node_elements=node_elements,
        base_element=base_element,
    )


def validate_skeleton(s: LogMapSkeleton, complex_: ConeComplex) -> list[str]:
    """Problems with a skeleton: local homomorphisms, nonzero ρ_q, and the node relation."""
    problems: list[str] = []
    t = s.type
    base_rank = s.base.lattice.rank
    for v in t.graph.vertices:
        cell = complex_.cell(t.vertex_cells[v])
        matrix = s.vertex_maps.get(v)
        if matrix is None:
            problems.append(f"vertex {v!r}: no map")
            continue
        if matrix.shape != (base_rank, cell.rank):
            problems.append(f"vertex {v!r}: map has shape {matrix.shape}, expected {(base_rank, cell.rank)}")
            continue
        if cell.rank == 0:
            continue
        for g in hilbert_basis(dual_cone(cell.cone), IntMatrix.identity(cell.rank).rows):
            image = tuple(int(x) for x in matrix.apply(g))
            if not s.base.contains(image):
                problems.append(f"vertex {v!r}: {list(g)} maps outside the base monoid")
            elif not any(image):
                problems.append(f"vertex {v!r}: {list(g)} maps to 0; the map is not local")
    for e in t.graph.edges:
        rho_q = s.node_elements.get(e.id)
        if rho_q is None or not any(rho_q) or not s.base.contains(rho_q):
            problems.append(f"node {e.id!r}: ρ_q must be a nonzero element of the base monoid")
            continue
        if problems:
            continue
        cell_id = t.edge_cells[e.id]
        m1 = complex_.face_map(t.vertex_cells[e.source], cell_id)
        m2 = complex_.face_map(t.vertex_cells[e.target], cell_id)
        u = t.edge_u[e.id]
        lhs = s.vertex_maps[e.target] @ m2.transpose()
        rhs = s.vertex_maps[e.source] @ m1.transpose()
        for i in range(base_rank):
            for j in range(len(u)):
                if lhs.rows[i][j] - rhs.rows[i][j] != u[j] * rho_q[i]:
                    problems.append(f"node {e.id!r}: φ(v₂)χ₂ − φ(v₁)χ₁ ≠ u_q·ρ_q")
                    break
            else:
                continue
            break
    return problems


def canonical_map(t: CombType, target: LogMapSkeleton, complex_: ConeComplex, *, basic: BasicMonoid | None = None) -> MonoidHom:
    """The map Q → Q′ dual to n ↦ ((φ_vᵀ n)_v, (n(ρ_q))_q)."""
    if target.type != t:
        raise StructuralError("target skeleton has a different combinatorial type")
    problems = validate_skeleton(target, complex_)
    if problems:
        raise StructuralError("target skeleton is invalid", data={"problems": problems})
    basic = basic or basic_monoid(t, complex_)
    dual = basic.dual
    base = target.base
    if base.rank != base.lattice.rank:
        raise StructuralError("base monoid of the target must have a full-rank group")
    r = base.lattice.rank
    columns: list[Vector] = []
    for j in range(r):
        ambient = [0] * len(dual.variables)
        for v in t.graph.vertices:
            matrix = target.vertex_maps[v]
            off = dual.offsets[v]
            for i in range(matrix.ncols):
                ambient[off + i] = matrix.rows[j][i]
        for e in t.graph.edges:
            ambient[dual.length_index[e.id]] = target.node_elements[e.id][j]
        coords = dual.coordinates(ambient)
        if coords is None or any(c.denominator != 1 for c in coords):
            raise StructuralError("target skeleton does not factor through the basic monoid")
        columns.append(tuple(int(c) for c in coords))
    matrix = IntMatrix.from_rows(columns, ncols=dual.rank)
    return MonoidHom(source=basic.monoid, target=base, matrix=matrix)


def is_basic(t: CombType, target: LogMapSkeleton, complex_: ConeComplex) -> bool:
    return canonical_map(t, target, complex_).is_isomorphism()


# ---------------------------------------------------------------------------
# Tropicalization of a fibre
# ---------------------------------------------------------------------------


def _zero_length_fibres(t: CombType, lengths: Mapping[str, Fraction]) -> list[list[str]]:
    skeleton = nx.MultiGraph()
    skeleton.add_nodes_from(t.graph.vertices)
    for e in t.graph.edges:
        if lengths[e.id] == 0:
            skeleton.add_edge(e.source, e.target, key=e.id)
    order = {v: i for i, v in enumerate(t.graph.vertices)}
    return sorted(
        (sorted(comp, key=order.__getitem__) for comp in nx.connected_components(skeleton)), key=lambda f: order[f[0]]
    )


def tropicalize_fibre(s: LogMapSkeleton, m: Sequence[int | Fraction], complex_: ConeComplex) -> TropicalMap:
    """Positions φ_vᵀ(m), lengths m(ρ_q); zero-length edges are contracted and cells relocated."""
    t = s.type
    point = tuple(Fraction(x) for x in m)
    if len(point) != s.base.lattice.rank:
        raise StructuralError(f"point has {len(point)} coordinates, base monoid has rank {s.base.lattice.rank}")
    values = [dot(point, g) for g in s.base.generators]
    if any(v < 0 for v in values):
        raise ArgumentError("point is negative on the base monoid")

    positions = {v: tuple(s.vertex_maps[v].transpose().apply(point)) for v in t.graph.vertices}
    lengths = {e.id: dot(point, s.node_elements[e.id]) for e in t.graph.edges}
    height = dot(point, s.base_element) if s.base_element is not None else Fraction(1)

    collapsed = [e.id for e in t.graph.edges if lengths[e.id] == 0]
    fibres = _zero_length_fibres(t, lengths)
    located = {v: complex_.locate(t.vertex_cells[v], positions[v]) for v in t.graph.vertices}
    targets = {}
    representative = {}
    for fibre in fibres:
        name = fibre[0] if len(fibre) == 1 else "+".join(fibre)
        targets[name] = located[fibre[0]][0]
        representative[name] = fibre[0]
    contracted, _ = contract(t, collapsed, complex_=complex_, target_cells=targets)

    edge_cells = dict(contracted.edge_cells)
    edge_u = dict(contracted.edge_u)
    for e in contracted.graph.edges:
        cell_id = t.edge_cells[e.id]
        src = complex_.push(t.vertex_cells[representative[e.source]], cell_id, positions[representative[e.source]])
        tgt = complex_.push(t.vertex_cells[representative[e.target]], cell_id, positions[representative[e.target]])
        midpoint = tuple((a + b) / 2 for a, b in zip(src, tgt, strict=True))
        carrier, _ = complex_.locate(cell_id, midpoint)
        edge_cells[e.id] = carrier
        edge_u[e.id] = tuple(int(x) for x in complex_.express_in_face(carrier, cell_id, t.edge_u[e.id]))
    leg_cells = dict(contracted.leg_cells)
    leg_u = dict(contracted.leg_u)
    for leg in contracted.graph.legs:
        cell_id = t.leg_cells[leg.id]
        origin = representative[leg.vertex]
        base_point = complex_.push(t.vertex_cells[origin], cell_id, positions[origin])
        tip = tuple(a + x for a, x in zip(base_point, t.leg_u[leg.id], strict=True))
        carrier, _ = complex_.locate(cell_id, tip)
        leg_cells[leg.id] = carrier
        leg_u[leg.id] = tuple(int(x) for x in complex_.express_in_face(carrier, cell_id, t.leg_u[leg.id]))

    relocated = attrs.evolve(
        contracted,
        vertex_cells={name: targets[name] for name in contracted.graph.vertices},
        edge_cells=edge_cells,
        edge_u=edge_u,
        leg_cells=leg_cells,
        leg_u=leg_u,
    )
    new_positions = {name: located[representative[name]][1] for name in relocated.graph.vertices}
    new_lengths = {e.id: lengths[e.id] for e in relocated.graph.edges}
    logger.debug("monoid.tropicalized", contracted=len(collapsed), vertices=len(relocated.graph.vertices))
    return TropicalMap(type=relocated, positions=new_positions, lengths=new_lengths, height=height)
