"""Lattices, rational polyhedral cones, toric monoids and their duals."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from fractions import Fraction
from itertools import combinations, product
from typing import Literal

import attrs
import structlog

from .config import get_settings
from .errors import CapabilityError, StructuralError
from .linalg import (
    INFINITE,
    IntMatrix,
    QVector,
    Vector,
    dot,
    express,
    integer_kernel,
    integral_length,
    inverse,
    lattice_basis,
    nullspace,
    primitive,
    rank,
    saturated_basis,
    smith_normal_form,
    sublattice_index as _sublattice_index,
)

logger = structlog.get_logger("logdecomp.lattice")

__all__ = [
    "INFINITE",
    "Cone",
    "Lattice",
    "MonoidHom",
    "ToricMonoid",
    "dual_cone",
    "dual_generators",
    "hilbert_basis",
    "integral_length",
    "monoid_dual",
    "saturation",
    "smith_normal_form",
    "sublattice_index",
]


@attrs.frozen
class Lattice:
    """The free abelian group ℤ^rank."""

    rank: int = attrs.field(validator=attrs.validators.ge(0))


def sublattice_index(generators: Sequence[Sequence[int]], ambient: Lattice) -> int | Literal["infinite"]:
    return _sublattice_index(generators, ambient.rank)


def _describe(n: int, generators: Sequence[Vector]) -> tuple[tuple[Vector, ...], tuple[Vector, ...], tuple[Vector, ...]]:
    """Return (extremal rays, facet normals, equations) of the cone spanned by ``generators``."""
    gens = sorted({primitive(g) for g in generators if any(g)})
    if not gens:
        return (), (), tuple(IntMatrix.identity(n).rows)
    kernel = integer_kernel(IntMatrix.from_rows(gens, ncols=n))
    equations = tuple(lattice_basis(kernel, n)) if kernel else ()
    d = n - len(equations)

    facets: set[Vector] = set()
    for subset in combinations(gens, d - 1):
        rows = [*subset, *equations]
        if rank(rows, n) != n - 1:
            continue
        (normal,) = nullspace(rows, n)
        y = primitive(normal)
        values = [dot(y, g) for g in gens]
        if all(v >= 0 for v in values):
            facets.add(y)
        elif all(v <= 0 for v in values):
            facets.add(tuple(-c for c in y))
    facet_list = tuple(sorted(facets))

    if rank([*facet_list, *equations], n) != n:
        raise StructuralError("cone contains a line", data={"generators": [list(g) for g in gens]})

    rays: list[Vector] = []
    for g in gens:
        tight = [y for y in facet_list if dot(y, g) == 0]
        if rank([*tight, *equations], n) == n - 1:
            rays.append(g)
    return tuple(sorted(set(rays))), facet_list, equations


@attrs.frozen
class Cone:
    """A strictly convex rational polyhedral cone in ℤ^n.

    Equality compares the lattice and the sorted primitive ray set; the facet
    description is derived data computed once at construction.
    """

    lattice: Lattice
    rays: tuple[Vector, ...]
    facet_normals: tuple[Vector, ...] = attrs.field(eq=False, repr=False)
    equations: tuple[Vector, ...] = attrs.field(eq=False, repr=False)

    @classmethod
    def from_generators(cls, rank_: int, generators: Iterable[Sequence[int]]) -> Cone:
        gens = [tuple(int(x) for x in g) for g in generators]
        for g in gens:
            if len(g) != rank_:
                raise StructuralError(f"generator {list(g)} does not live in a rank-{rank_} lattice")
        rays, facets, equations = _describe(rank_, gens)
        return cls(lattice=Lattice(rank_), rays=rays, facet_normals=facets, equations=equations)

    @classmethod
    def orthant(cls, rank_: int) -> Cone:
        return cls.from_generators(rank_, IntMatrix.identity(rank_).rows)

    @property
    def rank(self) -> int:
        return self.lattice.rank

    @property
    def dim(self) -> int:
        return self.rank - len(self.equations)

    @property
    def is_full_dimensional(self) -> bool:
        return not self.equations

    @property
    def is_simplicial(self) -> bool:
        return len(self.rays) == self.dim

    def is_unimodular(self) -> bool:
        """Simplicial with rays forming a basis of the saturated span."""
        if not self.is_simplicial:
            return False
        if not self.rays:
            return True
        basis = saturated_basis(self.rays, self.rank)
        coords = [express(basis, r) for r in self.rays]
        matrix = IntMatrix.from_rows(([int(c) for c in row] for row in coords if row is not None), ncols=len(basis))
        return matrix.is_unimodular()

    def contains(self, x: Sequence[int | Fraction]) -> bool:
        return all(dot(e, x) == 0 for e in self.equations) and all(dot(y, x) >= 0 for y in self.facet_normals)

    def in_relative_interior(self, x: Sequence[int | Fraction]) -> bool:
        return all(dot(e, x) == 0 for e in self.equations) and all(dot(y, x) > 0 for y in self.facet_normals)

    def faces(self) -> tuple[frozenset[int], ...]:
        """All faces as sets of ray indices, from the apex to the cone itself."""
        everything = frozenset(range(len(self.rays)))
        found: set[frozenset[int]] = {everything}
        frontier = [frozenset(i for i, r in enumerate(self.rays) if dot(y, r) == 0) for y in self.facet_normals]
        while frontier:
            face = frontier.pop()
            if face in found:
                continue
            found.add(face)
            frontier.extend(face & other for other in list(found) if (face & other) not in found)
        return tuple(sorted(found, key=lambda f: (len(f), sorted(f))))

    def face(self, indices: Iterable[int]) -> Cone:
        return Cone.from_generators(self.rank, [self.rays[i] for i in indices])


def dual_generators(c: Cone) -> tuple[Vector, ...]:
    """Generators of the (possibly non-strictly-convex) dual: facet normals plus ± equations."""
    return tuple([*c.facet_normals, *c.equations, *(tuple(-x for x in e) for e in c.equations)])


def dual_cone(c: Cone) -> Cone:
    """The strictly convex dual {m : ⟨m, c⟩ ≥ 0}; only defined for full-dimensional cones."""
    if not c.is_full_dimensional:
        raise StructuralError(
            "dual of a cone that is not full-dimensional contains a line",
            data={"rays": [list(r) for r in c.rays], "generators": [list(g) for g in dual_generators(c)]},
        )
    return Cone.from_generators(c.rank, c.facet_normals)


# ---------------------------------------------------------------------------
# Hilbert bases
# ---------------------------------------------------------------------------


def _cyclic_order(rays: Sequence[Vector]) -> list[Vector]:
    """Order the rays of a full-dimensional 3-cone around its boundary."""
    cone = Cone.from_generators(3, rays)
    neighbours: dict[Vector, list[Vector]] = {r: [] for r in cone.rays}
    for y in cone.facet_normals:
        edge = [r for r in cone.rays if dot(y, r) == 0]
        a, b = edge
        neighbours[a].append(b)
        neighbours[b].append(a)
    order = [cone.rays[0]]
    previous: Vector | None = None
    while len(order) < len(cone.rays):
        current = order[-1]
        nxt = next(r for r in neighbours[current] if r != previous and r not in order)
        previous = current
        order.append(nxt)
    return order


def _triangulate(rays: Sequence[Vector], d: int) -> list[tuple[Vector, ...]]:
    if d <= 2 or len(rays) == d:
        return [tuple(rays)]
    if d == 3:
        cycle = _cyclic_order(rays)
        return [(cycle[0], cycle[i], cycle[i + 1]) for i in range(1, len(cycle) - 1)]
    raise CapabilityError(f"triangulation of non-simplicial {d}-dimensional cones is not supported")


def _parallelepiped_points(generators: Sequence[Vector]) -> list[Vector]:
    """Nonzero lattice points of the half-open fundamental parallelepiped of a simplicial cone."""
    d = len(generators)
    columns = IntMatrix.from_columns(generators, d)
    inv = inverse(columns)
    ranges = []
    for i in range(d):
        low = sum(min(0, g[i]) for g in generators)
        high = sum(max(0, g[i]) for g in generators)
        ranges.append(range(low, high + 1))
    points: list[Vector] = []
    for x in product(*ranges):
        if not any(x):
            continue
        coeffs = [dot(row, x) for row in inv]
        if all(0 <= c < 1 for c in coeffs):
            points.append(tuple(x))
    return points


def _hilbert_basis_full(cone: Cone) -> list[Vector]:
    d = cone.rank
    candidates: set[Vector] = set(cone.rays)
    for simplex in _triangulate(cone.rays, d):
        candidates.update(_parallelepiped_points(simplex))
    irreducible = []
    for x in candidates:
        reducible = any(h != x and cone.contains(tuple(a - b for a, b in zip(x, h, strict=True))) for h in candidates)
        if not reducible:
            irreducible.append(x)
    return sorted(irreducible)


def _coordinates(basis: Sequence[Vector], vector: Sequence[int]) -> QVector:
    coords = express(basis, vector)
    if coords is None:
        raise StructuralError(f"vector {list(vector)} is outside the span of the lattice basis")
    return coords


def hilbert_basis(cone: Cone, basis: Sequence[Vector] | None = None, *, rank_cap: int | None = None) -> tuple[Vector, ...]:
    """Hilbert basis of ``cone ∩ L`` where L is ℤ-spanned by ``basis`` (default: the saturated span).

    The computation is done in L-coordinates, so the cap applies to the cone dimension.
    """
    cap = rank_cap if rank_cap is not None else get_settings().lattice.hilbert_rank_cap
    if cone.dim > cap:
        raise CapabilityError(
            f"Hilbert basis of a {cone.dim}-dimensional cone exceeds the rank cap {cap}",
            data={"dimension": cone.dim, "cap": cap},
        )
    if cone.dim == 0:
        return ()
    lattice_vectors = list(basis) if basis is not None else saturated_basis(cone.rays, cone.rank)
    if len(lattice_vectors) != cone.dim:
        raise StructuralError("lattice basis does not match the cone dimension")
    local_rays = [primitive(_coordinates(lattice_vectors, r)) for r in cone.rays]
    local = Cone.from_generators(cone.dim, local_rays)
    result = []
    for h in _hilbert_basis_full(local):
        result.append(tuple(sum(c * b[i] for c, b in zip(h, lattice_vectors, strict=True)) for i in range(cone.rank)))
    logger.debug("lattice.hilbert_basis", dimension=cone.dim, size=len(result))
    return tuple(sorted(result))


# ---------------------------------------------------------------------------
# Monoids
# ---------------------------------------------------------------------------


@attrs.frozen
class ToricMonoid:
    """Fine saturated monoid ``cone ∩ group`` inside an ambient lattice.

    ``group_basis`` is a ℤ-basis of the groupification; ``generators`` is the
    Hilbert basis, sorted.
    """

    lattice: Lattice
    generators: tuple[Vector, ...]
    group_basis: tuple[Vector, ...] = attrs.field(eq=False)
    cone: Cone = attrs.field(eq=False, repr=False)

    @classmethod
    def from_cone(cls, cone: Cone, group_basis: Sequence[Vector] | None = None) -> ToricMonoid:
        basis = tuple(group_basis) if group_basis is not None else tuple(saturated_basis(cone.rays, cone.rank))
        generators = hilbert_basis(cone, basis)
        return cls(lattice=cone.lattice, generators=generators, group_basis=basis, cone=cone)

    @classmethod
    def free(cls, rank_: int) -> ToricMonoid:
        cone = Cone.orthant(rank_)
        basis = tuple(IntMatrix.identity(rank_).rows)
        return cls(lattice=Lattice(rank_), generators=basis, group_basis=basis, cone=cone)

    @property
    def rank(self) -> int:
        return len(self.group_basis)

    @property
    def is_free(self) -> bool:
        return len(self.generators) == self.rank

    def coordinates(self, v: Sequence[int]) -> QVector | None:
        return express(self.group_basis, v) if self.group_basis else (() if not any(v) else None)

    def in_group(self, v: Sequence[int]) -> bool:
        coords = self.coordinates(v)
        return coords is not None and all(c.denominator == 1 for c in coords)

    def contains(self, v: Sequence[int]) -> bool:
        return self.in_group(v) and self.cone.contains(v)

    def in_group_coordinates(self) -> ToricMonoid:
        """The same monoid written in the coordinates of ``group_basis``."""
        d = self.rank
        gens = [tuple(int(c) for c in _coordinates(self.group_basis, g)) for g in self.generators]
        cone = Cone.from_generators(d, [primitive(_coordinates(self.group_basis, r)) for r in self.cone.rays])
        return ToricMonoid(
            lattice=Lattice(d),
            generators=tuple(sorted(gens)),
            group_basis=tuple(IntMatrix.identity(d).rows),
            cone=cone,
        )


def monoid_dual(p: ToricMonoid) -> ToricMonoid:
    """``Hom(P, ℕ)`` in the dual basis of ``P``'s group basis."""
    local = p.in_group_coordinates()
    dual = dual_cone(local.cone)
    return ToricMonoid.from_cone(dual, IntMatrix.identity(local.rank).rows)


def saturation(generators: Sequence[Sequence[int]], *, within_group: bool = False, rank_: int | None = None) -> ToricMonoid:
    """Lattice points of the real cone spanned by ``generators``.

    By default the points are taken in the ambient lattice; ``within_group=True``
    saturates inside the group the generators generate instead.
    """
    gens = [tuple(int(x) for x in g) for g in generators]
    n = rank_ if rank_ is not None else (len(gens[0]) if gens else 0)
    cone = Cone.from_generators(n, gens)
    if within_group:
        basis = lattice_basis([g for g in gens if any(g)], n)
    else:
        basis = saturated_basis(cone.rays, n)
    return ToricMonoid.from_cone(cone, basis)


@attrs.frozen
class MonoidHom:
    """Homomorphism ``source → target`` given on ambient coordinates."""

    source: ToricMonoid
    target: ToricMonoid
    matrix: IntMatrix

    def __attrs_post_init__(self) -> None:
        if self.matrix.shape != (self.target.lattice.rank, self.source.lattice.rank):
            raise StructuralError(
                f"matrix of shape {self.matrix.shape} cannot map rank {self.source.lattice.rank} to rank {self.target.lattice.rank}"
            )

    def __call__(self, v: Sequence[int]) -> Vector:
        return tuple(int(x) for x in self.matrix.apply(v))

    def check(self) -> list[Vector]:
        """Source generators whose image falls outside the target monoid."""
        return [g for g in self.source.generators if not self.target.contains(self(g))]

    def compose(self, inner: MonoidHom) -> MonoidHom:
        """``self ∘ inner``."""
        return MonoidHom(source=inner.source, target=self.target, matrix=self.matrix @ inner.matrix)

    def is_isomorphism(self) -> bool:
        if self.source.rank != self.target.rank:
            return False
        images = sorted(self(g) for g in self.source.generators)
        return images == sorted(self.target.generators)


def index_in_saturation(generators: Sequence[Sequence[int]], n: int) -> int:
    """Index of the generated group inside its saturation."""
    nonzero = [g for g in generators if any(g)]
    if not nonzero:
        return 1
    form = smith_normal_form(IntMatrix.from_rows(nonzero, ncols=n))
    index = 1
    for d in form.diagonal:
        if d:
            index *= d
    return index
