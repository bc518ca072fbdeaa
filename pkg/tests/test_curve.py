from __future__ import annotations

import pytest

from logdecomp.complex import Cell, ConeComplex, FaceMap
from logdecomp.curve import (
    CombType,
    Decoration,
    DegreeData,
    Edge,
    Graph,
    Leg,
    automorphism_count,
    contract,
    degree_defect,
    genus,
    is_partition,
    isomorphisms,
    normalize_legs,
    total_class,
    validate_type,
)
from logdecomp.errors import ContractionError, StructuralError
from logdecomp.lattice import Cone
from logdecomp.linalg import IntMatrix


def _segment_type(u=(-1, 1), parallel: int = 1) -> CombType:
    edges = [Edge(f"E{i}", "v1", "v2") for i in range(1, parallel + 1)]
    return CombType(
        graph=Graph(vertices=["v1", "v2"], edges=edges),
        genera={"v1": 0, "v2": 0},
        vertex_cells={"v1": "r1", "v2": "r2"},
        edge_cells={e.id: "Q" for e in edges},
        edge_u={e.id: u for e in edges},
    )


def test_graph_rejects_dangling_references():
    with pytest.raises(StructuralError):
        Graph(vertices=["a", "a"])
    with pytest.raises(StructuralError):
        Graph(vertices=["a"], edges=[Edge("e", "a", "b")])
    with pytest.raises(StructuralError):
        Graph(vertices=["a"], legs=[Leg("x", "b")])
    with pytest.raises(StructuralError):
        Graph(vertices=["a"], edges=[Edge("e", "a", "a")], legs=[Leg("e", "a")])


def test_type_requires_cells_and_contact_orders():
    with pytest.raises(StructuralError, match="no cell"):
        CombType(graph=Graph(vertices=["v"]), genera={}, vertex_cells={})
    with pytest.raises(StructuralError, match="negative genus"):
        CombType(graph=Graph(vertices=["v"]), genera={"v": -1}, vertex_cells={"v": "Q"})
    with pytest.raises(StructuralError, match="contact order"):
        CombType(graph=Graph(vertices=["v"], edges=[Edge("e", "v", "v")]), genera={}, vertex_cells={"v": "Q"})


def test_genus_counts_loops_and_weights():
    t = CombType(
        graph=Graph(vertices=["a", "b"], edges=[Edge("e1", "a", "b"), Edge("e2", "a", "b"), Edge("l", "b", "b")]),
        genera={"a": 1, "b": 0},
        vertex_cells={"a": "Q", "b": "Q"},
        edge_cells={"e1": "Q", "e2": "Q", "l": "Q"},
        edge_u={"e1": (0, 0), "e2": (0, 0), "l": (0, 0)},
    )
    assert genus(t) == 3
    disconnected = CombType(graph=Graph(vertices=["a", "b"]), genera={}, vertex_cells={"a": "Q", "b": "Q"})
    with pytest.raises(StructuralError):
        genus(disconnected)


def test_validate_type_against_interval(load_complex):
    c = load_complex("interval").complex
    assert validate_type(_segment_type(), c) == []
    wrong_length = _segment_type(u=(1,))
    assert any("chart length" in p for p in validate_type(wrong_length, c))
    misplaced = CombType(
        graph=Graph(vertices=["v1", "v2"], edges=[Edge("E", "v1", "v2")]),
        genera={},
        vertex_cells={"v1": "r1", "v2": "Q"},
        edge_cells={"E": "r2"},
        edge_u={"E": (1,)},
    )
    assert any("not a face" in p for p in validate_type(misplaced, c))


def test_contract_edge_to_common_face(load_complex):
    c = load_complex("interval").complex
    contracted, _ = contract(_segment_type(), ["E1"], complex_=c)
    assert contracted.graph.vertices == ("v1+v2",)
    assert contracted.vertex_cells == {"v1+v2": "0"}
    assert contracted.graph.edges == ()
    assert genus(contracted) == 0


def test_contract_parallel_edge_raises_genus(load_complex):
    c = load_complex("interval").complex
    contracted, _ = contract(_segment_type(parallel=2), ["E1"], complex_=c)
    assert len(contracted.graph.edges) == 1
    assert contracted.graph.edges[0].is_loop
    assert genus(contracted) == 1


def test_contract_without_common_face():
    cells = [Cell("r1", Cone.orthant(1)), Cell("r2", Cone.orthant(1)), Cell("Q", Cone.orthant(2))]
    maps = [FaceMap("r1", "Q", IntMatrix.from_rows([[1], [0]])), FaceMap("r2", "Q", IntMatrix.from_rows([[0], [1]]))]
    c = ConeComplex(cells, maps)
    with pytest.raises(ContractionError):
        contract(_segment_type(), ["E1"], complex_=c)


def test_contract_with_explicit_target(load_complex):
    c = load_complex("interval").complex
    with pytest.raises(ContractionError):
        contract(_segment_type(), ["E1"], complex_=c, target_cells={"v1+v2": "r1"})


def test_contract_pushes_decorations(load_complex):
    c = load_complex("interval").complex
    degree = DegreeData.uniform_data(1)
    decoration = Decoration({"v1": (1,), "v2": (2,)})
    _, pushed = contract(_segment_type(), ["E1"], complex_=c, decoration=decoration, degree=degree)
    assert pushed is not None and pushed["v1+v2"] == (3,)
    with pytest.raises(StructuralError):
        contract(_segment_type(), ["E1"], complex_=c, decoration=decoration)


def test_partition_and_total_class():
    t = _segment_type()
    degree = DegreeData.uniform_data(2)
    decoration = Decoration({"v1": (1, 0), "v2": (0, 1)})
    assert total_class(decoration, degree, t.vertex_cells) == (1, 1)
    assert is_partition(t, decoration, (1, 1), degree)
    assert not is_partition(t, decoration, (1, 0), degree)
    assert not is_partition(t, Decoration({"v1": (1, 1)}), (1, 1), degree)


def test_degree_groups_must_match():
    degree = DegreeData(total_rank=1, groups={"r1": 1}, to_total={"r1": IntMatrix.from_rows([[2]])})
    assert degree.push_total("r1", (3,)) == (6,)
    with pytest.raises(StructuralError):
        degree.push_total("r1", (1, 1))
    with pytest.raises(StructuralError):
        degree.group_rank("Q")
    with pytest.raises(StructuralError):
        degree.push_face("0", "r1", (1,))


def test_parallel_edges_have_two_automorphisms():
    assert automorphism_count(_segment_type()) == 1
    assert automorphism_count(_segment_type(parallel=2)) == 2
    assert automorphism_count(_segment_type(parallel=3)) == 6


def test_decorations_break_symmetry():
    t = CombType(
        graph=Graph(vertices=["a", "b"], edges=[Edge("e", "a", "b")]),
        genera={},
        vertex_cells={"a": "Q", "b": "Q"},
        edge_cells={"e": "Q"},
        edge_u={"e": (0, 0)},
    )
    assert automorphism_count(t) == 2
    assert automorphism_count(t, Decoration({"a": (1,), "b": (1,)})) == 2
    assert automorphism_count(t, Decoration({"a": (1,), "b": (2,)})) == 1


def test_isomorphisms_between_renamed_types():
    t1 = _segment_type()
    t2 = CombType(
        graph=Graph(vertices=["x", "y"], edges=[Edge("F", "y", "x")]),
        genera={},
        vertex_cells={"x": "r1", "y": "r2"},
        edge_cells={"F": "Q"},
        edge_u={"F": (1, -1)},
    )
    (iso,) = isomorphisms(t1, t2)
    assert iso.vertex_map == {"v1": "x", "v2": "y"}
    assert iso.edge_map == {"E1": ("F", True)}
    assert isomorphisms(t1, _segment_type(u=(-2, 2))) == []
    assert isomorphisms(t1, t2, Decoration({"v1": (1,), "v2": (0,)}), None) == []


def test_leg_order_is_respected():
    def with_legs(order):
        return CombType(
            graph=Graph(vertices=["a", "b"], edges=[Edge("e", "a", "b")], legs=[Leg(n, v) for n, v in order]),
            genera={},
            vertex_cells={"a": "Q", "b": "Q"},
            edge_cells={"e": "Q"},
            edge_u={"e": (0, 0)},
            leg_cells={n: "Q" for n, _ in order},
            leg_u={n: (0, 0) for n, _ in order},
        )

    t = with_legs([("x1", "a"), ("x2", "b")])
    assert automorphism_count(t) == 1
    assert len(isomorphisms(t, with_legs([("x1", "b"), ("x2", "a")]))) == 1


def test_normalize_legs_drops_zero_contact():
    t = CombType(
        graph=Graph(vertices=["a"], legs=[Leg("x", "a"), Leg("y", "a")]),
        genera={},
        vertex_cells={"a": "Q"},
        leg_cells={"x": "Q", "y": "Q"},
        leg_u={"x": (0, 0), "y": (1, 0)},
    )
    assert [leg.id for leg in normalize_legs(t).graph.legs] == ["y"]
    assert [leg.id for leg in normalize_legs(t, keep=["x"]).graph.legs] == ["x", "y"]
    assert isomorphisms(t, normalize_legs(t)) == []
    assert len(isomorphisms(t, normalize_legs(t), drop_zero_legs=True)) == 1


def test_degree_defect_reads_contact_along_a_divisor(load_complex):
    c = load_complex("interval").complex
    degree = DegreeData(total_rank=1, uniform=True, divisors={"r1": {"r1": (1,), "r2": (0,)}})
    decoration = Decoration({"v1": (1,), "v2": (1,)})

    defects = degree_defect(_segment_type(), decoration, degree, c)

    assert defects == {("v1", "r1"): 2, ("v2", "r1"): -1}


def _triangle_type() -> CombType:
    return CombType(
        graph=Graph(
            vertices=["a", "b", "c"],
            edges=[Edge("e1", "a", "b"), Edge("e2", "b", "c"), Edge("e3", "c", "a")],
            legs=[Leg("x", "c")],
        ),
        genera={"a": 0, "b": 1, "c": 0},
        vertex_cells={"a": "r1", "b": "Q", "c": "Q"},
        edge_cells={"e1": "r1", "e2": "Q", "e3": "r1"},
        edge_u={"e1": (0,), "e2": (0, 0), "e3": (0,)},
        leg_cells={"x": "Q"},
        leg_u={"x": (0, 0)},
    )


def test_contracting_in_stages_matches_contracting_at_once(load_complex):
    c = load_complex("interval").complex
    t = _triangle_type()
    degree = DegreeData.uniform_data(1)
    decoration = Decoration({"a": (1,), "b": (2,), "c": (4,)})

    at_once, d_once = contract(t, ["e1", "e2"], complex_=c, decoration=decoration, degree=degree)
    for first, second in (("e1", "e2"), ("e2", "e1")):
        partial, d_partial = contract(t, [first], complex_=c, decoration=decoration, degree=degree)
        staged, d_staged = contract(partial, [second], complex_=c, decoration=d_partial, degree=degree)
        assert staged == at_once
        assert d_staged is not None and d_once is not None
        assert d_staged["a+b+c"] == d_once["a+b+c"] == (7,)

    assert at_once.graph.vertices == ("a+b+c",)
    assert at_once.vertex_cells == {"a+b+c": "r1"}
    assert genus(at_once) == genus(t) == 2


def _isomorphism_key(iso) -> tuple:
    return tuple(sorted(iso.vertex_map.items())), tuple(sorted(iso.edge_map.items()))


def _composed(outer, inner) -> tuple:
    vertices = {v: outer.vertex_map[w] for v, w in inner.vertex_map.items()}
    edges = {}
    for e, (f, flipped) in inner.edge_map.items():
        g, flipped_again = outer.edge_map[f]
        edges[e] = (g, flipped != flipped_again)
    return tuple(sorted(vertices.items())), tuple(sorted(edges.items()))


def _loops(count: int) -> CombType:
    loops = [Edge(f"l{i}", "v", "v") for i in range(count)]
    return CombType(
        graph=Graph(vertices=["v"], edges=loops),
        genera={"v": 0},
        vertex_cells={"v": "Q"},
        edge_cells={e.id: "Q" for e in loops},
        edge_u={e.id: (0, 0) for e in loops},
    )


def test_a_loop_can_be_turned_around():
    assert automorphism_count(_loops(1)) == 2
    assert automorphism_count(_loops(2)) == 8


@pytest.mark.parametrize("t", [_loops(2), _segment_type(parallel=3), _triangle_type()], ids=["loops", "parallel", "triangle"])
def test_automorphisms_form_a_group(t):
    group = isomorphisms(t, t)
    keys = {_isomorphism_key(g) for g in group}
    assert len(keys) == len(group)

    identity = (
        tuple((v, v) for v in sorted(t.graph.vertices)),
        tuple(sorted((e.id, (e.id, False)) for e in t.graph.edges)),
    )
    assert identity in keys
    for a in group:
        assert any(_composed(a, b) == identity for b in group)
        for b in group:
            assert _composed(a, b) in keys
