from __future__ import annotations

import random
from functools import cache
from itertools import product

import pytest

from logdecomp.errors import CapabilityError, StructuralError
from logdecomp.lattice import (
    Cone,
    MonoidHom,
    ToricMonoid,
    dual_cone,
    hilbert_basis,
    index_in_saturation,
    monoid_dual,
    saturation,
)
from logdecomp.linalg import IntMatrix, dot


def _cone_points(cone: Cone, radius: int) -> list[tuple[int, ...]]:
    return [x for x in product(range(-radius, radius + 1), repeat=cone.rank) if any(x) and cone.contains(x)]


def test_cone_normalizes_rays():
    cone = Cone.from_generators(2, [(2, 0), (1, 2), (3, 2), (0, 0)])
    assert cone.rays == ((1, 0), (1, 2))
    assert cone == Cone.from_generators(2, [(1, 2), (1, 0)])
    assert cone.is_simplicial and not cone.is_unimodular()
    assert Cone.orthant(3).is_unimodular()


def test_cone_rejects_lines_and_bad_generators():
    with pytest.raises(StructuralError):
        Cone.from_generators(1, [(1,), (-1,)])
    with pytest.raises(StructuralError):
        Cone.from_generators(2, [(1, 0, 0)])


def test_faces_of_orthant():
    faces = Cone.orthant(2).faces()
    assert [len(f) for f in faces] == [0, 1, 1, 2]
    assert len(Cone.orthant(3).faces()) == 8


def test_lower_dimensional_cone():
    cone = Cone.from_generators(3, [(1, 0, 0), (0, 1, 0)])
    assert cone.dim == 2 and not cone.is_full_dimensional
    assert cone.contains((1, 1, 0)) and not cone.contains((1, 1, 1))
    assert cone.in_relative_interior((1, 1, 0)) and not cone.in_relative_interior((1, 0, 0))
    with pytest.raises(StructuralError):
        dual_cone(cone)


def test_hilbert_basis_of_a_wide_plane_cone():
    cone = Cone.from_generators(2, [(1, 0), (1, 2)])
    assert hilbert_basis(cone, rank_cap=3) == ((1, 0), (1, 1), (1, 2))


def test_hilbert_basis_respects_rank_cap():
    with pytest.raises(CapabilityError) as excinfo:
        hilbert_basis(Cone.orthant(4), rank_cap=3)
    assert excinfo.value.exit_code == 3


def test_hilbert_basis_of_non_simplicial_three_cone():
    cone = Cone.from_generators(3, [(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)])
    basis = hilbert_basis(cone, rank_cap=3)
    assert set(basis) == {(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1), (0, 0, 1)}


def test_hilbert_bases_generate_and_are_minimal_on_random_plane_cones():
    rng = random.Random(1234)
    for _ in range(15):
        while True:
            r1 = (rng.randint(-3, 3), rng.randint(-3, 3))
            r2 = (rng.randint(-3, 3), rng.randint(-3, 3))
            if r1[0] * r2[1] - r1[1] * r2[0] != 0:
                break
        cone = Cone.from_generators(2, [r1, r2])
        basis = hilbert_basis(cone, rank_cap=3)
        height = tuple(sum(col) for col in zip(*cone.facet_normals))

        @cache
        def representable(x: tuple[int, ...], basis=basis, cone=cone) -> bool:
            if not any(x):
                return True
            return any(
                cone.contains(rest) and representable(rest)
                for h in basis
                for rest in [tuple(a - b for a, b in zip(x, h))]
            )

        for x in _cone_points(cone, 5):
            assert representable(x)
        for h in basis:
            smaller = [a for a in _cone_points(cone, 6) if 0 < dot(height, a) < dot(height, h)]
            assert not any(cone.contains(tuple(p - q for p, q in zip(h, a))) for a in smaller)


def test_saturation_ambient_versus_group():
    ambient = saturation([(2, 0), (0, 2)])
    assert ambient.generators == ((0, 1), (1, 0))
    inner = saturation([(2, 0), (0, 2)], within_group=True)
    assert inner.generators == ((0, 2), (2, 0))
    assert inner.is_free and ambient.is_free
    assert not inner.contains((1, 0)) and ambient.contains((1, 0))
    assert index_in_saturation([(2, 0), (0, 2)], 2) == 4


def test_non_free_monoid_and_its_dual():
    p = saturation([(1, 0), (1, 2)])
    assert not p.is_free
    assert p.generators == ((1, 0), (1, 1), (1, 2))
    assert monoid_dual(p).generators == ((0, 1), (1, 0), (2, -1))


def test_dual_of_a_plane_cone_and_its_double_dual():
    cone = Cone.from_generators(2, [(1, 0), (1, 2)])

    dual = dual_cone(cone)

    assert set(dual.rays) == {(0, 1), (2, -1)}
    assert set(dual_cone(dual).rays) == set(cone.rays)


def test_double_dual_on_random_plane_cones():
    rng = random.Random(31)
    checked = 0
    while checked < 40:
        a = (rng.randint(-6, 6), rng.randint(-6, 6))
        b = (rng.randint(-6, 6), rng.randint(-6, 6))
        if a[0] * b[1] - a[1] * b[0] == 0:
            continue
        cone = Cone.from_generators(2, [a, b])
        dual = dual_cone(cone)
        assert all(dot(y, r) >= 0 for y in dual.rays for r in cone.rays)
        assert set(dual_cone(dual).rays) == set(cone.rays)
        checked += 1


def test_monoid_dual_of_the_free_monoid_is_free():
    dual = monoid_dual(ToricMonoid.free(2))
    assert dual.is_free
    assert set(dual.generators) == {(1, 0), (0, 1)}


def test_monoid_double_dual_returns_the_saturated_monoid():
    p = saturation([(1, 0), (1, 2)])
    assert monoid_dual(monoid_dual(p)).generators == p.generators == ((1, 0), (1, 1), (1, 2))


def test_monoid_hom_checks_images():
    source = ToricMonoid.free(1)
    target = ToricMonoid.free(2)
    good = MonoidHom(source, target, IntMatrix.from_rows([[1], [1]]))
    assert good.check() == []
    assert good((3,)) == (3, 3)
    bad = MonoidHom(source, target, IntMatrix.from_rows([[1], [-1]]))
    assert bad.check() == [(1,)]
    assert MonoidHom(target, target, IntMatrix.identity(2)).is_isomorphism()
    with pytest.raises(StructuralError):
        MonoidHom(source, target, IntMatrix.identity(2))


def test_monoid_hom_composition():
    line = ToricMonoid.free(1)
    plane = ToricMonoid.free(2)
    diagonal = MonoidHom(line, plane, IntMatrix.from_rows([[1], [1]]))
    total = MonoidHom(plane, line, IntMatrix.from_rows([[1, 1]]))

    composite = total.compose(diagonal)

    assert composite.source is line
    assert composite.target is line
    assert composite((3,)) == (6,)
    assert composite.check() == []
    assert not composite.is_isomorphism()
