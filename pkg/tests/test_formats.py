from __future__ import annotations

from fractions import Fraction

import pytest
from jsonschema import Draft202012Validator

from logdecomp.enhance import Verdict
from logdecomp.errors import SchemaError, StructuralError
from logdecomp.formats import (
    KINDS,
    build_beta,
    build_complex,
    build_transverse,
    build_type,
    dump_json,
    format_rational,
    parse_rational,
    read_document,
    schema_for,
    type_to_document,
    validate_document,
)


def _complex_doc(**extra):
    doc = {
        "schema_version": 1,
        "kind": "complex",
        "cells": [{"id": "0", "rank": 0, "rays": []}, {"id": "r", "rank": 1, "rays": [[1]]}],
        "face_maps": [{"small": "0", "big": "r", "matrix": [[]]}],
    }
    doc.update(extra)
    return doc


@pytest.mark.parametrize("kind", KINDS)
def test_every_schema_is_valid_draft_2020_12(kind):
    schema = schema_for(kind)

    Draft202012Validator.check_schema(schema)
    assert schema["properties"]["kind"] == {"const": kind}


def test_unknown_kind_is_a_schema_error():
    with pytest.raises(SchemaError) as excinfo:
        schema_for("polytope")

    assert "complex" in excinfo.value.data["kinds"]


def test_unknown_fields_are_rejected():
    with pytest.raises(SchemaError) as excinfo:
        validate_document(_complex_doc(colour="blue"))

    assert excinfo.value.data["errors"]


def test_kind_mismatch_is_rejected():
    with pytest.raises(SchemaError):
        validate_document(_complex_doc(), "fan")


def test_document_must_be_an_object():
    with pytest.raises(SchemaError):
        validate_document([1, 2, 3])


def test_schema_version_is_pinned():
    with pytest.raises(SchemaError):
        validate_document(_complex_doc(schema_version=2))


@pytest.mark.parametrize("value", ["1/0", "0.5", "one", "1/-2"])
def test_malformed_rationals_fail_the_schema(value):
    doc = {"schema_version": 1, "kind": "type", "vertices": [{"id": "v", "cell": "r"}], "height": value}

    with pytest.raises(SchemaError):
        validate_document(doc)


def test_rationals_parse_exactly():
    assert parse_rational("-3/4") == Fraction(-3, 4)
    assert parse_rational(7) == 7
    with pytest.raises(SchemaError):
        parse_rational(True)
    with pytest.raises(SchemaError):
        parse_rational("1/0")


def test_format_rational_reduces():
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-6, 4)) == "-3/2"
    assert format_rational(5) == "5"


def test_dump_json_is_canonical():
    payload = {"b": Fraction(1, 2), "a": [Fraction(4, 2)], "verdict": Verdict.COUNTED}

    text = dump_json(payload)

    assert text == '{\n  "a": [\n    "2"\n  ],\n  "b": "1/2",\n  "verdict": "counted"\n}'
    assert dump_json(dict(reversed(payload.items()))) == text


def test_read_document_errors(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")

    with pytest.raises(SchemaError):
        read_document(tmp_path / "missing.json")
    with pytest.raises(SchemaError):
        read_document(broken)


def test_face_map_to_unknown_cell():
    doc = _complex_doc(face_maps=[{"small": "0", "big": "nowhere", "matrix": [[]]}])

    with pytest.raises(StructuralError):
        build_complex(validate_document(doc))


def test_ray_of_the_wrong_length():
    doc = _complex_doc(cells=[{"id": "0", "rank": 0, "rays": []}, {"id": "r", "rank": 1, "rays": [[1, 0]]}])

    with pytest.raises(StructuralError):
        build_complex(validate_document(doc))


def test_fan_documents_carry_their_fan(fixture_path):
    data = build_complex(read_document(fixture_path("toric_plane", "fan.json")))

    assert data.fan is not None
    assert data.rho is not None
    assert data.complex.cell("0").rank == 0


def test_type_document_is_accepted_back(load_type):
    body = load_type("cubic_pencil", "interior_type.json")

    rebuilt = build_type(validate_document(type_to_document(body.type)))

    assert rebuilt.type == body.type
    assert rebuilt.decoration is None
    assert rebuilt.map is None


def test_type_document_with_positions_builds_a_map(load_type):
    body = load_type("cubic_pencil", "interior_map.json")

    assert body.map is not None
    assert body.map.positions["v0"] == (Fraction(1, 3),) * 3
    assert body.map.lengths["F1"] == Fraction(1, 3)
    assert body.map.height == 1


def test_chart_nodes_are_expanded(fixture_path):
    d = build_transverse(read_document(fixture_path("cubic_pencil", "exceptional.json"), "transverse"))

    node = d.nodes[0]
    assert (node.m1, node.m2, node.rho, node.w) == ((1, 0), (0, 1), (3, 1), (1, 3))


def test_beta_document(fixture_path):
    data = build_beta(read_document(fixture_path("f2_points", "beta.json"), "beta"))

    assert data.beta.genus == 0
    assert [leg.id for leg in data.beta.legs if leg.point is not None] == ["p1", "p2", "p3"]
    assert data.beta.total_class == (1, 1, 1)
    assert data.degree is not None
    assert data.degree.total_rank == 3
