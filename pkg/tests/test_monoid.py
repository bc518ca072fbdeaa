from __future__ import annotations

import random
from fractions import Fraction
from math import gcd

import pytest

from logdecomp.curve import CombType, Edge, Graph
from logdecomp.enhance import Component, FreeNode, TransverseMapData, base_order, node_from_chart, transverse_type
from logdecomp.errors import ArgumentError
from logdecomp.formats import build_transverse, read_document
from logdecomp.lattice import MonoidHom, ToricMonoid
from logdecomp.linalg import IntMatrix, inverse
from logdecomp.monoid import (
    LogMapSkeleton,
    basic_dual,
    basic_monoid,
    basic_skeleton,
    canonical_map,
    evaluation_skeleton,
    is_basic,
    tropicalize_fibre,
    validate_skeleton,
)
from logdecomp.tropmap import validate_map


@pytest.fixture
def crossing(load_complex, load_type):
    data = load_complex("interval")
    return data, load_type("interval", "rigid_type.json").type


def test_dual_cone_of_the_crossing_edge(crossing):
    data, t = crossing

    dual = basic_dual(t, data.complex)

    assert dual.variables == ("V(v1)[0]", "V(v2)[0]", "e(E1)")
    assert dual.rank == 1
    assert dual.to_dict()["rays"] == [[1, 1, 1]]
    assert dual.block("v2", (3,)) == (3,)
    assert dual.length("E1", (3,)) == 3


def test_basic_monoid_is_free_of_rank_one(crossing):
    data, t = crossing

    basic = basic_monoid(t, data.complex, data.rho)

    assert basic.is_free
    assert basic.monoid.rank == 1
    assert basic.base_coefficients == (1,)
    payload = basic.to_dict()
    assert payload["rank"] == 1
    assert payload["free"] is True
    assert payload["base_coefficients"] == [1]


def test_basic_monoid_without_a_base_map(crossing):
    data, t = crossing

    basic = basic_monoid(t, data.complex)

    assert basic.base_map is None
    assert basic.base_coefficients is None
    assert basic.is_free


def test_universal_skeleton_is_basic(crossing):
    data, t = crossing
    skeleton = basic_skeleton(t, data.complex, data.rho)

    assert validate_skeleton(skeleton, data.complex) == []
    assert skeleton.node_elements == {"E1": (1,)}
    assert is_basic(t, skeleton, data.complex)


def test_evaluated_skeleton_is_not_basic(crossing):
    data, t = crossing
    basic = basic_monoid(t, data.complex, data.rho)

    skeleton = evaluation_skeleton(basic, (2,))

    assert validate_skeleton(skeleton, data.complex) == []
    assert skeleton.node_elements == {"E1": (2,)}
    assert skeleton.base_element == (2,)
    hom = canonical_map(t, skeleton, data.complex, basic=basic)
    assert hom.matrix.rows == ((2,),)
    assert not is_basic(t, skeleton, data.complex)


def test_evaluation_outside_the_dual_cone(crossing):
    data, t = crossing
    basic = basic_monoid(t, data.complex, data.rho)

    with pytest.raises(ArgumentError):
        evaluation_skeleton(basic, (-1,))


def test_tropicalized_fibre_is_the_rigid_witness(crossing):
    data, t = crossing
    skeleton = basic_skeleton(t, data.complex, data.rho)

    fibre = tropicalize_fibre(skeleton, (1,), data.complex)

    assert fibre.positions == {"v1": (Fraction(1),), "v2": (Fraction(1),)}
    assert fibre.lengths == {"E1": Fraction(1)}
    assert fibre.height == 1
    assert validate_map(fibre, data.complex, data.rho).valid


def _hook_type() -> CombType:
    # v1 on the ray r1, joined across Q to v2; v3 sits on top of v2
    return CombType(
        graph=Graph(vertices=["v1", "v2", "v3"], edges=[Edge("E1", "v1", "v2"), Edge("E2", "v2", "v3")]),
        genera={"v1": 0, "v2": 0, "v3": 0},
        vertex_cells={"v1": "r1", "v2": "Q", "v3": "Q"},
        edge_cells={"E1": "Q", "E2": "Q"},
        edge_u={"E1": (-1, 1), "E2": (0, 0)},
    )


def _point_of_the_dual(basic, positions, lengths):
    dual = basic.dual
    ambient = [0] * len(dual.variables)
    for v, coords in positions.items():
        for i, x in enumerate(coords):
            ambient[dual.offsets[v] + i] = x
    for e, length in lengths.items():
        ambient[dual.length_index[e]] = length
    point = dual.coordinates(ambient)
    assert point is not None
    return point


def test_zero_length_edges_are_contracted_when_tropicalizing(load_complex):
    data = load_complex("interval")
    t = _hook_type()
    basic = basic_monoid(t, data.complex, data.rho)
    skeleton = basic_skeleton(t, data.complex, data.rho)
    assert basic.is_free and basic.monoid.rank == 3

    # E1 runs all the way to r2 and E2 has length m(ρ_q) = 0
    m = _point_of_the_dual(basic, {"v1": (1,), "v2": (0, 1), "v3": (0, 1)}, {"E1": 1, "E2": 0})
    fibre = tropicalize_fibre(skeleton, m, data.complex)

    assert fibre.type.graph.vertices == ("v1", "v2+v3")
    assert fibre.type.vertex_cells == {"v1": "r1", "v2+v3": "r2"}
    assert [e.id for e in fibre.type.graph.edges] == ["E1"]
    assert fibre.type.edge_cells == {"E1": "Q"}
    assert fibre.positions == {"v1": (Fraction(1),), "v2+v3": (Fraction(1),)}
    assert fibre.lengths == {"E1": Fraction(1)}
    assert fibre.height == 1
    assert validate_map(fibre, data.complex, data.rho).valid


def test_tropicalizing_a_generic_point_keeps_the_type(load_complex):
    data = load_complex("interval")
    t = _hook_type()
    basic = basic_monoid(t, data.complex, data.rho)
    skeleton = basic_skeleton(t, data.complex, data.rho)

    m = _point_of_the_dual(basic, {"v1": (2,), "v2": (1, 1), "v3": (1, 1)}, {"E1": 1, "E2": 3})
    fibre = tropicalize_fibre(skeleton, m, data.complex)

    assert fibre.type == t
    assert fibre.lengths == {"E1": Fraction(1), "E2": Fraction(3)}
    assert fibre.height == 2


def _pushed_forward(skeleton: LogMapSkeleton, matrix: IntMatrix) -> LogMapSkeleton:
    return LogMapSkeleton(
        type=skeleton.type,
        base=ToricMonoid.free(matrix.nrows),
        vertex_maps={v: matrix @ phi for v, phi in skeleton.vertex_maps.items()},
        node_elements={q: matrix.apply(rho_q) for q, rho_q in skeleton.node_elements.items()},
        base_element=matrix.apply(skeleton.base_element) if skeleton.base_element is not None else None,
    )


def test_canonical_map_is_contravariant(load_complex):
    data = load_complex("interval")
    t = _hook_type()
    basic = basic_monoid(t, data.complex, data.rho)
    universal = basic_skeleton(t, data.complex, data.rho)

    # Q → ℕ² sending the three generators of Q to (1, 0), (0, 1) and (1, 1)
    images = [(1, 0), (0, 1), (1, 1)]
    g_inv = inverse(IntMatrix.from_columns(basic.monoid.generators, 3))
    psi1 = IntMatrix.from_rows(
        [[int(sum(images[k][i] * g_inv[k][j] for k in range(3))) for j in range(3)] for i in range(2)], ncols=3
    )
    psi2 = IntMatrix.from_rows([[2, 3]])

    over_plane = _pushed_forward(universal, psi1)
    over_line = _pushed_forward(over_plane, psi2)
    assert validate_skeleton(over_plane, data.complex) == []
    assert validate_skeleton(over_line, data.complex) == []

    c0 = canonical_map(t, universal, data.complex, basic=basic)
    c1 = canonical_map(t, over_plane, data.complex, basic=basic)
    c2 = canonical_map(t, over_line, data.complex, basic=basic)

    assert c0.is_isomorphism()
    assert c1.matrix == psi1 @ c0.matrix
    assert c2.matrix == psi2 @ c1.matrix
    assert MonoidHom(over_plane.base, over_line.base, psi2).compose(c1).matrix == c2.matrix
    assert not is_basic(t, over_plane, data.complex)


def test_exceptional_component_monoid(fixture_path):
    d = build_transverse(read_document(fixture_path("cubic_pencil", "exceptional.json"), "transverse"))
    complex_, rho, t = transverse_type(d)

    basic = basic_monoid(t, complex_, rho)

    assert basic.monoid.rank == 1
    assert basic.is_free
    assert basic.base_coefficients == (3,)


def _random_chain(rng: random.Random) -> TransverseMapData:
    """Components in a chain over distinct targets, plus free loops; pre-log by construction."""
    size = rng.randint(1, 4)
    mus = [rng.randint(1, 4) for _ in range(size)]
    components = [Component(f"C{i}", mu) for i, mu in enumerate(mus)]
    nodes = []
    for i in range(size - 1):
        mu1, mu2 = mus[i], mus[i + 1]
        g = gcd(mu1, mu2)
        k = rng.randint(1, 2)
        nodes.append(node_from_chart(f"q{i}", (f"C{i}", f"C{i + 1}"), r=0, s=1, a=mu2, c=mu1, w=(mu1 // g * k, mu2 // g * k)))
    loops = [FreeNode(f"f{j}", (f"C{c}", f"C{c}")) for j, c in enumerate(rng.choices(range(size), k=rng.randint(0, 4 - len(nodes))))]
    return TransverseMapData(components=components, nodes=nodes, free_nodes=loops)


def test_basic_monoid_of_random_transverse_chains():
    rng = random.Random(5150)
    for _ in range(50):
        d = _random_chain(rng)
        complex_, rho, t = transverse_type(d)

        basic = basic_monoid(t, complex_, rho)

        assert basic.is_free
        assert basic.monoid.rank == 1 + len(d.free_nodes)
        assert basic.base_coefficients == (base_order(d), *([0] * len(d.free_nodes)))
