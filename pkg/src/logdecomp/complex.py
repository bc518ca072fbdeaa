"""Generalized cone complexes, base maps to ℝ≥0, height-one slices and embedded fans."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Literal

import attrs
import structlog

from .errors import ArgumentError, StructuralError
from .lattice import Cone, index_in_saturation
from .linalg import IntMatrix, QVector, Vector, dot, express, inverse, primitive, saturated_basis, smith_normal_form

logger = structlog.get_logger("logdecomp.complex")

Classification = Literal["simple", "monodromy_free", "neither"]
ZERO_CELL = "0"


@attrs.frozen
class Cell:
    """A cone in its own lattice ℤ^rank, full-dimensional there.

    ``embedding`` (ambient rank × rank) is only present for cells that come from an
    embedded fan; its columns are the chart basis.
    """

    id: str
    cone: Cone
    embedding: IntMatrix | None = attrs.field(default=None, eq=False)

    def __attrs_post_init__(self) -> None:
        if not self.cone.is_full_dimensional:
            raise StructuralError(f"cell {self.id!r} is not full-dimensional in its own lattice")

    @property
    def rank(self) -> int:
        return self.cone.rank


@attrs.frozen
class FaceMap:
    """Embedding of the small cell's lattice into the big cell's lattice (big.rank × small.rank)."""

    small: str
    big: str
    matrix: IntMatrix


@attrs.frozen
class BaseMap:
    """Per-cell integer covectors describing ρ: Σ(X) → ℝ≥0."""

    covectors: Mapping[str, Vector] = attrs.field(converter=dict)

    def value(self, cell: str, point: Sequence[int | Fraction]) -> int | Fraction:
        return dot(self.covectors[cell], point)

    def __getitem__(self, cell: str) -> Vector:
        try:
            return self.covectors[cell]
        except KeyError as exc:
            raise StructuralError(f"base map has no covector for cell {cell!r}") from exc


@dataclass(slots=True, frozen=True)
class ComplexReport:
    cells: int
    closed_under_faces: bool
    missing_faces: tuple[tuple[str, tuple[Vector, ...]], ...]
    saturated: bool
    unsaturated: tuple[tuple[str, str], ...]
    classification: Classification
    witnesses: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.closed_under_faces and self.saturated and self.classification == "simple"

    def to_dict(self) -> dict[str, Any]:
        return {
            "cells": self.cells,
            "closed_under_faces": self.closed_under_faces,
            "missing_faces": [{"cell": c, "rays": [list(r) for r in rays]} for c, rays in self.missing_faces],
            "saturated": self.saturated,
            "unsaturated": [{"small": s, "big": b} for s, b in self.unsaturated],
            "classification": self.classification,
            "witnesses": list(self.witnesses),
            "ok": self.ok,
        }


@attrs.frozen
class ConeComplex:
    """Finite diagram of cones with face morphisms, indexed by user-chosen cell ids."""

    cells: tuple[Cell, ...] = attrs.field(converter=tuple)
    face_maps: tuple[FaceMap, ...] = attrs.field(converter=tuple, factory=tuple)
    _index: dict[str, Cell] = attrs.field(init=False, factory=dict, eq=False, repr=False)
    _cache: dict[str, Any] = attrs.field(init=False, factory=dict, eq=False, repr=False)

    def __attrs_post_init__(self) -> None:
        for cell in self.cells:
            if cell.id in self._index:
                raise StructuralError(f"duplicate cell id {cell.id!r}")
            self._index[cell.id] = cell

    # -- lookup --------------------------------------------------------------

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.cells)

    def __contains__(self, cell_id: object) -> bool:
        return cell_id in self._index

    def cell(self, cell_id: str) -> Cell:
        try:
            return self._index[cell_id]
        except KeyError as exc:
            raise StructuralError(f"unknown cell {cell_id!r}") from exc

    # -- face structure ------------------------------------------------------

    def _checked_maps(self) -> None:
        if self._cache.get("checked"):
            return
        for f in self.face_maps:
            _check_face_map(self, f)
        self._cache["checked"] = True

    def composites(self) -> dict[tuple[str, str], frozenset[IntMatrix]]:
        """All composite face maps, identities included."""
        cached = self._cache.get("composites")
        if cached is not None:
            return cached
        self._checked_maps()
        maps: dict[tuple[str, str], set[IntMatrix]] = defaultdict(set)
        for c in self.cells:
            maps[(c.id, c.id)].add(IntMatrix.identity(c.rank))
        for f in self.face_maps:
            maps[(f.small, f.big)].add(f.matrix)
        changed = True
        while changed:
            changed = False
            for (a, b), inner in list(maps.items()):
                if a == b:
                    continue
                for (b2, c), outer in list(maps.items()):
                    if b2 != b or b == c:
                        continue
                    for m in list(inner):
                        for n in list(outer):
                            composite = n @ m
                            if composite not in maps[(a, c)]:
                                maps[(a, c)].add(composite)
                                changed = True
        frozen = {key: frozenset(value) for key, value in maps.items()}
        self._cache["composites"] = frozen
        return frozen

    def is_face(self, small: str, big: str) -> bool:
        return (small, big) in self.composites()

    def face_map(self, small: str, big: str) -> IntMatrix:
        """The unique composite face map ``small → big``."""
        matrices = self.composites().get((small, big))
        if not matrices:
            raise StructuralError(f"cell {small!r} is not a face of {big!r}", data={"small": small, "big": big})
        if len(matrices) > 1:
            raise StructuralError(f"cell {small!r} maps to {big!r} in several ways; the complex is not simple")
        (matrix,) = matrices
        return matrix

    def faces_of(self, big: str) -> list[str]:
        return [a for (a, b) in self.composites() if b == big]

    def cofaces(self, small: str) -> list[str]:
        return [b for (a, b) in self.composites() if a == small]

    def common_cells(self, cell_ids: Iterable[str]) -> list[str]:
        """Cells having every given cell as a face."""
        ids = list(cell_ids)
        if not ids:
            return list(self.ids)
        result = set(self.cofaces(ids[0]))
        for other in ids[1:]:
            result &= set(self.cofaces(other))
        return sorted(result, key=lambda c: (self.cell(c).rank, c))

    def common_faces(self, cell_ids: Iterable[str]) -> list[str]:
        ids = list(cell_ids)
        result = set(self.faces_of(ids[0]))
        for other in ids[1:]:
            result &= set(self.faces_of(other))
        return sorted(result, key=lambda c: (self.cell(c).rank, c))

    def push(self, small: str, big: str, vector: Sequence[int | Fraction]) -> tuple:
        return self.face_map(small, big).apply(vector)

    def image_cone(self, small: str, big: str) -> Cone:
        matrix = self.face_map(small, big)
        big_cell = self.cell(big)
        rays = [primitive(matrix.apply(r)) for r in self.cell(small).cone.rays]
        return Cone.from_generators(big_cell.rank, rays)

    def locate(self, cell_id: str, point: Sequence[int | Fraction]) -> tuple[str, QVector]:
        """Minimal face of ``cell_id`` containing ``point`` in its relative interior, with chart coordinates."""
        cell = self.cell(cell_id)
        values = tuple(Fraction(x) for x in point)
        if len(values) != cell.rank:
            raise StructuralError(f"point {list(point)} is not in the chart of {cell_id!r}")
        if not cell.cone.contains(values):
            raise StructuralError(f"point {[str(v) for v in values]} is outside cell {cell_id!r}")
        for face in sorted(self.faces_of(cell_id), key=lambda c: (self.cell(c).rank, c)):
            if self.image_cone(face, cell_id).in_relative_interior(values):
                matrix = self.face_map(face, cell_id)
                coords = express(matrix.columns(), values) if matrix.ncols else ()
                if coords is None:
                    raise ArithmeticError("relative-interior point outside the span of its face")
                return face, coords
        raise StructuralError(f"complex is not closed under faces around cell {cell_id!r}")

    def express_in_face(self, face: str, big: str, vector: Sequence[int | Fraction]) -> QVector:
        matrix = self.face_map(face, big)
        coords = express(matrix.columns(), vector) if matrix.ncols else ()
        if coords is None:
            raise StructuralError(f"vector {list(vector)} does not lie in face {face!r} of {big!r}")
        return coords

    # -- embedded charts -----------------------------------------------------

    def to_chart(self, cell_id: str, ambient: Sequence[int | Fraction]) -> QVector:
        cell = self.cell(cell_id)
        if cell.embedding is None:
            raise StructuralError(f"cell {cell_id!r} has no ambient embedding")
        coords = express(cell.embedding.columns(), ambient) if cell.rank else ()
        if coords is None:
            raise StructuralError(f"ambient vector {list(ambient)} is not in the span of cell {cell_id!r}")
        return coords

    def from_chart(self, cell_id: str, chart: Sequence[int | Fraction]) -> tuple:
        cell = self.cell(cell_id)
        if cell.embedding is None:
            raise StructuralError(f"cell {cell_id!r} has no ambient embedding")
        return cell.embedding.apply(chart)

    @property
    def report(self) -> ComplexReport:
        cached = self._cache.get("report")
        if cached is None:
            cached = validate_complex(self)
            self._cache["report"] = cached
        return cached

    def require_simple(self) -> None:
        report = self.report
        if not report.ok:
            raise StructuralError(
                "complex must be simple, closed under faces and saturated",
                data=report.to_dict(),
            )


def _check_face_map(c: ConeComplex, f: FaceMap) -> None:
    if f.small == f.big:
        raise StructuralError(f"self-map on cell {f.small!r} is not allowed", data={"small": f.small, "big": f.big})
    small, big = c.cell(f.small), c.cell(f.big)
    pair = {"small": f.small, "big": f.big}
    if f.matrix.shape != (big.rank, small.rank):
        raise StructuralError(
            f"face map {f.small!r} → {f.big!r} has shape {f.matrix.shape}, expected {(big.rank, small.rank)}", data=pair
        )
    if small.rank and f.matrix.rank() != small.rank:
        raise StructuralError(f"face map {f.small!r} → {f.big!r} is not injective", data=pair)
    if small.rank >= big.rank:
        raise StructuralError(f"face map {f.small!r} → {f.big!r} is an isomorphism between distinct cells", data=pair)
    images = {primitive(f.matrix.apply(r)) for r in small.cone.rays}
    for face in big.cone.faces():
        if {big.cone.rays[i] for i in face} == images:
            return
    raise StructuralError(f"face map {f.small!r} → {f.big!r} does not land on a face", data=pair)


def validate_complex(c: ConeComplex) -> ComplexReport:
    """Check face maps and classify the complex; malformed maps raise ``StructuralError``."""
    c._checked_maps()
    composites = c.composites()

    missing: list[tuple[str, tuple[Vector, ...]]] = []
    for cell in c.cells:
        present = set()
        for face in c.faces_of(cell.id):
            for m in composites[(face, cell.id)]:
                present.add(frozenset(primitive(m.apply(r)) for r in c.cell(face).cone.rays))
        for face_indices in cell.cone.faces():
            rays = frozenset(cell.cone.rays[i] for i in face_indices)
            if rays not in present:
                missing.append((cell.id, tuple(sorted(rays))))

    unsaturated = tuple(
        (f.small, f.big) for f in c.face_maps if f.matrix.ncols and index_in_saturation(f.matrix.columns(), f.matrix.nrows) != 1
    )

    classification: Classification = "simple"
    witnesses: list[str] = []
    for (small, big), matrices in sorted(composites.items()):
        if len(matrices) < 2:
            continue
        images = [frozenset(primitive(m.apply(r)) for r in c.cell(small).cone.rays) for m in matrices]
        if len(set(images)) < len(images):
            classification = "neither"
            witnesses.append(f"{small}->{big}: distinct maps onto the same face")
        else:
            if classification == "simple":
                classification = "monodromy_free"
            witnesses.append(f"{small}->{big}: {len(matrices)} distinct faces")

    report = ComplexReport(
        cells=len(c.cells),
        closed_under_faces=not missing,
        missing_faces=tuple(missing),
        saturated=not unsaturated,
        unsaturated=unsaturated,
        classification=classification,
        witnesses=tuple(witnesses),
    )
    logger.debug("complex.validated", cells=len(c.cells), classification=classification, closed=not missing)
    return report


def validate_base_map(c: ConeComplex, rho: BaseMap) -> None:
    """Raise unless ρ has a covector per cell, is compatible with face maps and nonnegative."""
    for cell in c.cells:
        covector = rho[cell.id]
        if len(covector) != cell.rank:
            raise StructuralError(f"covector for cell {cell.id!r} has length {len(covector)}, expected {cell.rank}")
        negative = [r for r in cell.cone.rays if dot(covector, r) < 0]
        if negative:
            raise StructuralError(f"base map is negative on cell {cell.id!r}", data={"rays": [list(r) for r in negative]})
    for f in c.face_maps:
        big = rho[f.big]
        pulled = tuple(dot(big, f.matrix.column(j)) for j in range(f.matrix.ncols))
        if pulled != tuple(rho[f.small]):
            raise StructuralError(
                f"base map is incompatible with face map {f.small!r} → {f.big!r}",
                data={"pulled_back": list(pulled), "declared": list(rho[f.small])},
            )


def delta_cells(c: ConeComplex, rho: BaseMap) -> list[str]:
    """Cells on which ρ is not identically zero."""
    return [cell.id for cell in c.cells if any(dot(rho[cell.id], r) for r in cell.cone.rays)]


@dataclass(slots=True, frozen=True)
class PolyCell:
    id: str
    vertices: tuple[QVector, ...]
    recession: tuple[Vector, ...]
    dimension: int

    @property
    def bounded(self) -> bool:
        return not self.recession


@dataclass(slots=True, frozen=True)
class PolyComplex:
    """Height-one slice Δ(X) = ρ⁻¹(1), one polyhedron per cell where ρ ≢ 0."""

    cells: tuple[PolyCell, ...]
    faces: tuple[tuple[str, str], ...] = field(default=())

    def cell(self, cell_id: str) -> PolyCell:
        for p in self.cells:
            if p.id == cell_id:
                return p
        raise KeyError(cell_id)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.cells)


def slice(c: ConeComplex, rho: BaseMap) -> PolyComplex:  # noqa: A001
    validate_base_map(c, rho)
    kept = delta_cells(c, rho)
    cells = []
    for cell_id in kept:
        cell = c.cell(cell_id)
        covector = rho[cell_id]
        vertices = []
        recession = []
        for r in cell.cone.rays:
            height = dot(covector, r)
            if height:
                vertices.append(tuple(Fraction(x, height) for x in r))
            else:
                recession.append(r)
        cells.append(PolyCell(id=cell_id, vertices=tuple(vertices), recession=tuple(recession), dimension=cell.rank - 1))
    kept_set = set(kept)
    faces = tuple(
        sorted((a, b) for (a, b) in c.composites() if a != b and a in kept_set and b in kept_set)
    )
    return PolyComplex(cells=tuple(cells), faces=faces)


def ray_multiplicity(c: ConeComplex, rho: BaseMap, ray_id: str) -> int:
    """ρ evaluated on the primitive generator of a ray cell."""
    cell = c.cell(ray_id)
    if cell.rank != 1:
        raise ArgumentError(f"cell {ray_id!r} is not a ray (rank {cell.rank})")
    (generator,) = cell.cone.rays
    value = dot(rho[ray_id], generator)
    if value < 0:
        raise StructuralError(f"base map is negative on ray {ray_id!r}")
    return int(value)


# ---------------------------------------------------------------------------
# Embedded fans
# ---------------------------------------------------------------------------


def _cone_id(names: Iterable[str], order: Sequence[str]) -> str:
    ranked = sorted(names, key=order.index)
    return "+".join(ranked) if ranked else ZERO_CELL


@attrs.frozen
class Fan:
    """Embedded fan in ℤ^rank with named rays; ``cones`` lists generating cones by ray name."""

    rank: int
    rays: tuple[tuple[str, Vector], ...] = attrs.field(converter=lambda rs: tuple((n, tuple(v)) for n, v in rs))
    cones: tuple[tuple[str, ...], ...] = attrs.field(converter=lambda cs: tuple(tuple(c) for c in cs))

    def __attrs_post_init__(self) -> None:
        names = self.ray_names
        if len(set(names)) != len(names):
            raise StructuralError("duplicate ray names in fan")
        for name, vector in self.rays:
            if len(vector) != self.rank:
                raise StructuralError(f"ray {name!r} does not live in ℤ^{self.rank}")
            if primitive(vector) != vector or not any(vector):
                raise StructuralError(f"ray {name!r} is not primitive")
        for cone in self.cones:
            unknown = [n for n in cone if n not in names]
            if unknown:
                raise StructuralError(f"cone {list(cone)} uses unknown rays {unknown}")
            built = self.cone_of(cone)
            if len(built.rays) != len(cone):
                raise StructuralError(f"cone {list(cone)} has non-extremal generators")

    @property
    def ray_names(self) -> list[str]:
        return [n for n, _ in self.rays]

    def vector(self, name: str) -> Vector:
        return dict(self.rays)[name]

    def cone_of(self, names: Iterable[str]) -> Cone:
        return Cone.from_generators(self.rank, [self.vector(n) for n in names])

    def all_cones(self) -> list[frozenset[str]]:
        """Every face of every listed cone, the zero cone included."""
        found: set[frozenset[str]] = {frozenset()}
        for names in self.cones:
            cone = self.cone_of(names)
            by_vector = {self.vector(n): n for n in names}
            for face in cone.faces():
                found.add(frozenset(by_vector[cone.rays[i]] for i in face))
        order = self.ray_names
        return sorted(found, key=lambda s: (len(s), _cone_id(s, order)))

    def cone_id(self, names: Iterable[str]) -> str:
        return _cone_id(names, self.ray_names)

    def to_complex(self, rho: Sequence[int] | None = None) -> tuple[ConeComplex, BaseMap | None]:
        """Abstract the fan into a cone complex, keeping each cell's chart embedding."""
        order = self.ray_names
        cones = self.all_cones()
        bases: dict[frozenset[str], list[Vector]] = {}
        cells = []
        for names in cones:
            vectors = [self.vector(n) for n in names]
            basis = saturated_basis(vectors, self.rank)
            bases[names] = basis
            chart_rays = [tuple(int(x) for x in (express(basis, v) or ())) for v in vectors]
            embedding = IntMatrix.from_columns(basis, self.rank) if basis else IntMatrix.zeros(self.rank, 0)
            cells.append(Cell(id=_cone_id(names, order), cone=Cone.from_generators(len(basis), chart_rays), embedding=embedding))
        face_maps = []
        for small in cones:
            for big in cones:
                if not small < big:
                    continue
                columns = []
                for b in bases[small]:
                    coords = express(bases[big], b)
                    if coords is None:
                        raise StructuralError(f"cone {sorted(small)} is not contained in {sorted(big)}")
                    columns.append(tuple(int(x) for x in coords))
                matrix = IntMatrix.from_columns(columns, len(bases[big])) if columns else IntMatrix.zeros(len(bases[big]), 0)
                face_maps.append(FaceMap(small=_cone_id(small, order), big=_cone_id(big, order), matrix=matrix))
        complex_ = ConeComplex(cells=cells, face_maps=face_maps)
        base_map = None
        if rho is not None:
            if len(rho) != self.rank:
                raise StructuralError(f"ρ has length {len(rho)}, expected {self.rank}")
            covectors = {}
            for names in cones:
                covectors[_cone_id(names, order)] = tuple(dot(rho, b) for b in bases[names])
            base_map = BaseMap(covectors)
        return complex_, base_map

    def star_subdivide(self, vector: Sequence[int], name: str) -> Fan:
        """Stellar subdivision at a primitive vector of the support."""
        v = tuple(int(x) for x in vector)
        if primitive(v) != v:
            raise StructuralError(f"subdivision vector {list(v)} is not primitive")
        if name in self.ray_names:
            raise StructuralError(f"ray name {name!r} already used")
        if v in {vec for _, vec in self.rays}:
            raise StructuralError(f"vector {list(v)} is already a ray")
        new_cones: list[tuple[str, ...]] = []
        touched = False
        for names in self.cones:
            cone = self.cone_of(names)
            if not cone.contains(v):
                new_cones.append(names)
                continue
            touched = True
            by_vector = {self.vector(n): n for n in names}
            full = frozenset(range(len(cone.rays)))
            for face in cone.faces():
                # facets of the cone are the maximal proper faces
                if face == full or any(face < other < full for other in cone.faces()):
                    continue
                facet_vectors = [cone.rays[i] for i in face]
                if Cone.from_generators(self.rank, facet_vectors).contains(v):
                    continue
                new_cones.append((*(by_vector[r] for r in facet_vectors), name))
        if not touched:
            raise StructuralError(f"vector {list(v)} is outside the support of the fan")
        return Fan(rank=self.rank, rays=(*self.rays, (name, v)), cones=new_cones)


# ---------------------------------------------------------------------------
# Toric multiplicity check
# ---------------------------------------------------------------------------


@dataclass(slots=True, frozen=True)
class RayCheck:
    ray: str
    vector: Vector
    multiplicity: int
    valuation: int

    @property
    def agrees(self) -> bool:
        return self.multiplicity == self.valuation


@dataclass(slots=True, frozen=True)
class ConeCheck:
    cone: str
    simplicial: bool
    piecewise_linear: bool | None


@dataclass(slots=True, frozen=True)
class ToricReport:
    rays: tuple[RayCheck, ...]
    cones: tuple[ConeCheck, ...]
    nonnegative: bool

    @property
    def ok(self) -> bool:
        return self.nonnegative and all(r.agrees for r in self.rays) and all(c.piecewise_linear is not False for c in self.cones)

    def to_dict(self) -> dict[str, Any]:
        return {
            "rays": [
                {"ray": r.ray, "vector": list(r.vector), "multiplicity": r.multiplicity, "valuation": r.valuation, "agrees": r.agrees}
                for r in self.rays
            ],
            "cones": [{"cone": c.cone, "simplicial": c.simplicial, "piecewise_linear": c.piecewise_linear} for c in self.cones],
            "nonnegative": self.nonnegative,
            "ok": self.ok,
        }


def _chart_valuation(v: Vector, m: Sequence[int]) -> int:
    """Order of vanishing of z^m along D_v, read from a unimodular chart whose first basis vector is v."""
    form = smith_normal_form(IntMatrix.from_rows([v], ncols=len(v)))
    v_inv = inverse(form.V)
    basis_rows = [list(v), *([int(x) for x in row] for row in v_inv[1:])]
    basis = IntMatrix.from_rows(basis_rows, ncols=len(v))
    if not basis.is_unimodular():
        raise ArithmeticError(f"could not complete {list(v)} to a unimodular basis")
    dual_rows = [tuple(row) for row in zip(*inverse(basis), strict=True)]
    exponents = express(dual_rows, m)
    if exponents is None:
        raise ArithmeticError("dual basis does not span")
    return int(exponents[0])


def toric_check(fan: Fan, m: Sequence[int], charts: BaseMap | None = None) -> ToricReport:
    """Compare the complex's ray multiplicities with monomial valuations and check the PL decomposition.

    Multiplicities are read from the abstracted cone complex: each ray cell's chart
    covector evaluated on its chart generator. ``charts`` replaces the covectors
    derived from ``m``; valuations always come from the fan's vectors and the
    exponents of z^m, so a chart that disagrees with the fan is reported.
    """
    if len(m) != fan.rank:
        raise StructuralError(f"covector has length {len(m)}, expected {fan.rank}")
    complex_, derived = fan.to_complex(m)
    rho = charts if charts is not None else derived
    assert rho is not None
    for cell in complex_.cells:
        if len(rho[cell.id]) != cell.rank:
            raise StructuralError(f"covector for cell {cell.id!r} has length {len(rho[cell.id])}, expected {cell.rank}")

    rays = []
    for name, vec in fan.rays:
        (generator,) = complex_.cell(name).cone.rays
        rays.append(RayCheck(ray=name, vector=vec, multiplicity=int(dot(rho[name], generator)), valuation=_chart_valuation(vec, m)))
    multiplicity = {r.ray: r.multiplicity for r in rays}
    cones = []
    for names in fan.all_cones():
        if not names:
            continue
        cell = complex_.cell(fan.cone_id(names))
        vectors = [fan.vector(n) for n in names]
        cone = Cone.from_generators(fan.rank, vectors)
        if not cone.is_simplicial:
            cones.append(ConeCheck(cone=cell.id, simplicial=False, piecewise_linear=None))
            continue
        ordered = sorted(names, key=fan.ray_names.index)
        point = tuple(sum((k + 1) * fan.vector(n)[i] for k, n in enumerate(ordered)) for i in range(fan.rank))
        coefficients = express([fan.vector(n) for n in ordered], point)
        assert cell.embedding is not None and coefficients is not None
        chart_point = express(cell.embedding.columns(), point)
        assert chart_point is not None
        courant = sum(multiplicity[n] * c for n, c in zip(ordered, coefficients, strict=True))
        linear = courant == dot(rho[cell.id], chart_point) == dot(m, point)
        cones.append(ConeCheck(cone=cell.id, simplicial=True, piecewise_linear=linear))
    return ToricReport(rays=tuple(rays), cones=tuple(cones), nonnegative=all(r.multiplicity >= 0 for r in rays))
