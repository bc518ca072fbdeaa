"""JSON document schemas, loaders that build domain objects, and canonical output."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any

import orjson
from jsonschema import Draft202012Validator

from .complex import BaseMap, Cell, ConeComplex, FaceMap, Fan
from .curve import ClassBeta, CombType, Decoration, DegreeData, Edge, Graph, Leg, LegSpec
from .enhance import (
    Component,
    ConstrainedMarking,
    ConstrainedNode,
    FreeMarking,
    FreeNode,
    TransverseMapData,
    node_from_chart,
)
from .errors import SchemaError, StructuralError
from .lattice import Cone
from .linalg import IntMatrix
from .tropmap import LedgerEntry, PointConditions, TargetPoint, TropicalMap

SCHEMA_VERSION = 1

# ---------------------------------------------------------------------------
# Schemas
# ---------------------------------------------------------------------------

_RATIONAL: dict[str, Any] = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]*[1-9][0-9]*)?$"},
    ]
}
_INT_VECTOR: dict[str, Any] = {"type": "array", "items": {"type": "integer"}}
_RATIONAL_VECTOR: dict[str, Any] = {"type": "array", "items": {"$ref": "#/$defs/rational"}}
_MATRIX: dict[str, Any] = {"type": "array", "items": {"$ref": "#/$defs/int_vector"}}
_ID: dict[str, Any] = {"type": "string", "minLength": 1}


def _object(properties: Mapping[str, Any], required: list[str]) -> dict[str, Any]:
    return {"type": "object", "properties": dict(properties), "required": required, "additionalProperties": False}


def _document(kind: str, properties: Mapping[str, Any], required: list[str]) -> dict[str, Any]:
    return _object(
        {"schema_version": {"const": SCHEMA_VERSION}, "kind": {"const": kind}, **properties},
        ["schema_version", "kind", *required],
    )


_POINT = _object({"cell": _ID, "coords": {"$ref": "#/$defs/rational_vector"}}, ["cell", "coords"])

_TYPE_BODY = _object(
    {
        "vertices": {
            "type": "array",
            "minItems": 1,
            "items": _object({"id": _ID, "cell": _ID, "genus": {"type": "integer", "minimum": 0}}, ["id", "cell"]),
        },
        "edges": {
            "type": "array",
            "items": _object(
                {"id": _ID, "source": _ID, "target": _ID, "cell": _ID, "u": {"$ref": "#/$defs/int_vector"}},
                ["id", "source", "target", "cell", "u"],
            ),
        },
        "legs": {
            "type": "array",
            "items": _object(
                {"id": _ID, "vertex": _ID, "cell": _ID, "u": {"$ref": "#/$defs/int_vector"}},
                ["id", "vertex", "cell", "u"],
            ),
        },
        "decoration": {"type": "object", "additionalProperties": {"$ref": "#/$defs/int_vector"}},
        "points": {"type": "object", "additionalProperties": {"$ref": "#/$defs/point"}},
        "positions": {"type": "object", "additionalProperties": {"$ref": "#/$defs/rational_vector"}},
        "lengths": {"type": "object", "additionalProperties": {"$ref": "#/$defs/rational"}},
        "height": {"$ref": "#/$defs/rational"},
    },
    ["vertices"],
)

_DEGREE = _object(
    {
        "total_rank": {"type": "integer", "minimum": 0},
        "uniform": {"type": "boolean"},
        "groups": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
        "to_total": {"type": "object", "additionalProperties": {"$ref": "#/$defs/matrix"}},
        "along_faces": {
            "type": "array",
            "items": _object({"face": _ID, "cell": _ID, "matrix": {"$ref": "#/$defs/matrix"}}, ["face", "cell", "matrix"]),
        },
        "divisors": {
            "type": "object",
            "additionalProperties": {"type": "object", "additionalProperties": {"$ref": "#/$defs/int_vector"}},
        },
    },
    ["total_rank"],
)

_DEFS: dict[str, Any] = {
    "rational": _RATIONAL,
    "int_vector": _INT_VECTOR,
    "rational_vector": _RATIONAL_VECTOR,
    "matrix": _MATRIX,
    "point": _POINT,
    "type_body": _TYPE_BODY,
    "degree": _DEGREE,
}

_KIND_SCHEMAS: dict[str, dict[str, Any]] = {
    "complex": _document(
        "complex",
        {
            "cells": {
                "type": "array",
                "minItems": 1,
                "items": _object(
                    {"id": _ID, "rank": {"type": "integer", "minimum": 0}, "rays": {"$ref": "#/$defs/matrix"}},
                    ["id", "rank", "rays"],
                ),
            },
            "face_maps": {
                "type": "array",
                "items": _object({"small": _ID, "big": _ID, "matrix": {"$ref": "#/$defs/matrix"}}, ["small", "big", "matrix"]),
            },
            "base_map": {"type": "object", "additionalProperties": {"$ref": "#/$defs/int_vector"}},
        },
        ["cells"],
    ),
    "fan": _document(
        "fan",
        {
            "rank": {"type": "integer", "minimum": 1},
            "rays": {
                "type": "array",
                "minItems": 1,
                "items": _object({"name": _ID, "vector": {"$ref": "#/$defs/int_vector"}}, ["name", "vector"]),
            },
            "cones": {"type": "array", "items": {"type": "array", "items": _ID, "minItems": 1}},
            "rho": {"$ref": "#/$defs/int_vector"},
            "base_map": {"type": "object", "additionalProperties": {"$ref": "#/$defs/int_vector"}},
            "subdivide": {
                "type": "array",
                "items": _object({"name": _ID, "vector": {"$ref": "#/$defs/int_vector"}}, ["name", "vector"]),
            },
        },
        ["rank", "rays", "cones"],
    ),
    "type": _document("type", _TYPE_BODY["properties"], ["vertices"]),
    "ledger": _document(
        "ledger",
        {
            "entries": {
                "type": "array",
                "minItems": 1,
                "items": _object(
                    {"label": _ID, "count": {"$ref": "#/$defs/rational"}, "type": {"$ref": "#/$defs/type_body"}},
                    ["label", "count", "type"],
                ),
            },
            "total_class": {"$ref": "#/$defs/int_vector"},
            "degree": {"$ref": "#/$defs/degree"},
        },
        ["entries"],
    ),
    "transverse": _document(
        "transverse",
        {
            "components": {
                "type": "array",
                "minItems": 1,
                "items": _object(
                    {
                        "id": _ID,
                        "multiplicity": {"type": "integer", "minimum": 1},
                        "genus": {"type": "integer", "minimum": 0},
                        "target": _ID,
                    },
                    ["id", "multiplicity"],
                ),
            },
            "nodes": {
                "type": "array",
                "items": {
                    "oneOf": [
                        _object(
                            {
                                "id": _ID,
                                "branches": {"type": "array", "items": _ID, "minItems": 2, "maxItems": 2},
                                "m1": {"$ref": "#/$defs/int_vector"},
                                "m2": {"$ref": "#/$defs/int_vector"},
                                "rho": {"$ref": "#/$defs/int_vector"},
                                "w": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
                            },
                            ["id", "branches", "m1", "m2", "rho", "w"],
                        ),
                        _object(
                            {
                                "id": _ID,
                                "branches": {"type": "array", "items": _ID, "minItems": 2, "maxItems": 2},
                                "chart": _object(
                                    {k: {"type": "integer"} for k in ("r", "s", "a", "c")}, ["r", "s", "a", "c"]
                                ),
                                "w": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
                            },
                            ["id", "branches", "chart", "w"],
                        ),
                    ]
                },
            },
            "free_nodes": {
                "type": "array",
                "items": _object(
                    {"id": _ID, "branches": {"type": "array", "items": _ID, "minItems": 2, "maxItems": 2}}, ["id", "branches"]
                ),
            },
            "markings": {
                "type": "array",
                "items": _object(
                    {
                        "id": _ID,
                        "component": _ID,
                        "m1": {"$ref": "#/$defs/int_vector"},
                        "m2": {"$ref": "#/$defs/int_vector"},
                        "w1": {"type": "integer"},
                        "rho": {"$ref": "#/$defs/int_vector"},
                        "smooth_point": {"type": "boolean"},
                    },
                    ["id", "component", "m1", "m2", "w1"],
                ),
            },
            "free_markings": {
                "type": "array",
                "items": _object({"id": _ID, "component": _ID}, ["id", "component"]),
            },
            "torsor": {"enum": ["yes", "no", "auto"]},
            "markings_complete": {"type": "boolean"},
        },
        ["components"],
    ),
    "beta": _document(
        "beta",
        {
            "genus": {"type": "integer", "minimum": 0},
            "legs": {
                "type": "array",
                "items": _object(
                    {"id": _ID, "cell": _ID, "u": {"$ref": "#/$defs/int_vector"}, "point": {"$ref": "#/$defs/point"}},
                    ["id"],
                ),
            },
            "total_class": {"$ref": "#/$defs/int_vector"},
            "degree": {"$ref": "#/$defs/degree"},
        },
        ["genus", "legs"],
    ),
    "fixture": _document(
        "fixture",
        {
            "name": _ID,
            "description": {"type": "string"},
            "checks": {
                "type": "array",
                "minItems": 1,
                "items": _object(
                    {
                        "id": _ID,
                        "op": _ID,
                        "inputs": {"type": "object", "additionalProperties": {"type": "string"}},
                        "params": {"type": "object"},
                        "expected": {},
                        "tag": {"enum": ["PUBLISHED", "TRIVIAL", "DERIVED"]},
                    },
                    ["id", "op", "inputs", "expected", "tag"],
                ),
            },
        },
        ["name", "checks"],
    ),
}

KINDS: tuple[str, ...] = tuple(_KIND_SCHEMAS)


def schema_for(kind: str) -> dict[str, Any]:
    """Self-contained Draft 2020-12 schema for a document kind."""
    try:
        body = _KIND_SCHEMAS[kind]
    except KeyError as exc:
        raise SchemaError(f"unknown document kind {kind!r}", data={"kinds": list(KINDS)}) from exc
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "$id": f"https://logdecomp.invalid/schemas/{kind}.json",
        "title": f"logdecomp {kind} document",
        **body,
        "$defs": _DEFS,
    }


def validate_document(doc: Any, kind: str | None = None) -> dict[str, Any]:
    """Validate against the schema of ``kind`` (or the document's own ``kind``) and return it."""
    if not isinstance(doc, dict):
        raise SchemaError("document must be a JSON object")
    declared = doc.get("kind")
    if kind is not None and declared != kind:
        raise SchemaError(f"expected a {kind!r} document, got {declared!r}")
    validator = Draft202012Validator(schema_for(kind or str(declared)))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        raise SchemaError(
            errors[0].message,
            data={"errors": [{"path": "/".join(str(p) for p in e.absolute_path), "message": e.message} for e in errors]},
        )
    return doc


def read_document(path: Path | str, kind: str | None = None) -> dict[str, Any]:
    p = Path(path)
    try:
        raw = orjson.loads(p.read_bytes())
    except FileNotFoundError as exc:
        raise SchemaError(f"file not found: {p}") from exc
    except orjson.JSONDecodeError as exc:
        raise SchemaError(f"{p}: invalid JSON: {exc}") from exc
    return validate_document(raw, kind)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def format_rational(value: Fraction | int) -> str:
    q = Fraction(value)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _default(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, Enum):
        return obj.value
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_json(payload: Any) -> str:
    """Canonical JSON: sorted keys, two-space indent, rationals as reduced strings."""
    return orjson.dumps(
        payload, default=_default, option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2 | orjson.OPT_PASSTHROUGH_DATACLASS
    ).decode()


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def parse_rational(value: int | str) -> Fraction:
    if isinstance(value, bool):
        raise SchemaError("booleans are not rationals")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"not a rational: {value!r}") from exc


def _matrix(rows: list[list[int]], nrows: int, ncols: int, what: str) -> IntMatrix:
    if ncols == 0:
        return IntMatrix.zeros(nrows, 0)
    if len(rows) != nrows:
        raise StructuralError(f"{what}: expected {nrows} rows, got {len(rows)}")
    try:
        return IntMatrix.from_rows(rows, ncols=ncols)
    except ValueError as exc:
        raise StructuralError(f"{what}: {exc}") from exc


@dataclass(slots=True, frozen=True)
class ComplexInput:
    complex: ConeComplex
    rho: BaseMap | None
    fan: Fan | None = None


def build_fan(doc: Mapping[str, Any]) -> Fan:
    fan = Fan(rank=doc["rank"], rays=[(r["name"], r["vector"]) for r in doc["rays"]], cones=doc["cones"])
    for step in doc.get("subdivide", []):
        fan = fan.star_subdivide(step["vector"], step["name"])
    return fan


def build_base_map(doc: Mapping[str, Any]) -> BaseMap | None:
    """Per-cell covectors declared under ``base_map``, if any."""
    if "base_map" not in doc:
        return None
    return BaseMap({k: tuple(v) for k, v in doc["base_map"].items()})


def build_complex(doc: Mapping[str, Any]) -> ComplexInput:
    """A ``complex`` or ``fan`` document as a cone complex with its optional base map."""
    if doc["kind"] == "fan":
        fan = build_fan(doc)
        complex_, rho = fan.to_complex(doc.get("rho"))
        return ComplexInput(complex_, rho, fan)
    ranks = {}
    cells = []
    for c in doc["cells"]:
        ranks[c["id"]] = c["rank"]
        for ray in c["rays"]:
            if len(ray) != c["rank"]:
                raise StructuralError(f"cell {c['id']!r}: ray {ray} does not live in ℤ^{c['rank']}")
        cells.append(Cell(c["id"], Cone.from_generators(c["rank"], c["rays"])))
    face_maps = []
    for f in doc.get("face_maps", []):
        if f["small"] not in ranks or f["big"] not in ranks:
            raise StructuralError(f"face map {f['small']!r} → {f['big']!r} names an unknown cell")
        matrix = _matrix(f["matrix"], ranks[f["big"]], ranks[f["small"]], f"face map {f['small']} → {f['big']}")
        face_maps.append(FaceMap(f["small"], f["big"], matrix))
    return ComplexInput(ConeComplex(cells, face_maps), build_base_map(doc))


@dataclass(slots=True, frozen=True)
class TypeInput:
    type: CombType
    decoration: Decoration | None = None
    points: PointConditions | None = None
    map: TropicalMap | None = None


def build_type(doc: Mapping[str, Any]) -> TypeInput:
    vertices = doc["vertices"]
    edges = doc.get("edges", [])
    legs = doc.get("legs", [])
    t = CombType(
        graph=Graph(
            vertices=[v["id"] for v in vertices],
            edges=[Edge(e["id"], e["source"], e["target"]) for e in edges],
            legs=[Leg(leg["id"], leg["vertex"]) for leg in legs],
        ),
        genera={v["id"]: v.get("genus", 0) for v in vertices},
        vertex_cells={v["id"]: v["cell"] for v in vertices},
        edge_cells={e["id"]: e["cell"] for e in edges},
        edge_u={e["id"]: e["u"] for e in edges},
        leg_cells={leg["id"]: leg["cell"] for leg in legs},
        leg_u={leg["id"]: leg["u"] for leg in legs},
    )
    decoration = Decoration(doc["decoration"]) if "decoration" in doc else None
    points = None
    if "points" in doc:
        points = PointConditions(
            {leg: TargetPoint(p["cell"], [parse_rational(x) for x in p["coords"]]) for leg, p in doc["points"].items()}
        )
    tropical_map = None
    if "positions" in doc or "lengths" in doc:
        tropical_map = TropicalMap(
            type=t,
            positions={v: [parse_rational(x) for x in pos] for v, pos in doc.get("positions", {}).items()},
            lengths={e: parse_rational(x) for e, x in doc.get("lengths", {}).items()},
            decoration=decoration,
            height=parse_rational(doc.get("height", 1)),
        )
    return TypeInput(t, decoration, points, tropical_map)


def build_degree(doc: Mapping[str, Any]) -> DegreeData:
    total = doc["total_rank"]
    if doc.get("uniform"):
        return DegreeData.uniform_data(total)
    groups = dict(doc.get("groups", {}))
    to_total = {
        cell: _matrix(rows, total, groups.get(cell, 0), f"degree pushforward of {cell}") for cell, rows in doc.get("to_total", {}).items()
    }
    along = {
        (f["face"], f["cell"]): _matrix(f["matrix"], groups.get(f["face"], 0), groups.get(f["cell"], 0), f"degree map {f['cell']} → {f['face']}")
        for f in doc.get("along_faces", [])
    }
    divisors = {ray: {cell: tuple(v) for cell, v in per_cell.items()} for ray, per_cell in doc.get("divisors", {}).items()}
    return DegreeData(total_rank=total, groups=groups, to_total=to_total, along_faces=along, divisors=divisors)


@dataclass(slots=True, frozen=True)
class LedgerInput:
    entries: tuple[LedgerEntry, ...]
    total_class: tuple[int, ...] | None
    degree: DegreeData | None


def build_ledger(doc: Mapping[str, Any]) -> LedgerInput:
    entries = []
    for entry in doc["entries"]:
        body = build_type(entry["type"])
        entries.append(LedgerEntry(entry["label"], body.type, parse_rational(entry["count"]), body.decoration))
    total = tuple(doc["total_class"]) if "total_class" in doc else None
    degree = build_degree(doc["degree"]) if "degree" in doc else None
    return LedgerInput(tuple(entries), total, degree)


def build_transverse(doc: Mapping[str, Any]) -> TransverseMapData:
    nodes = []
    for n in doc.get("nodes", []):
        branches = (n["branches"][0], n["branches"][1])
        if "chart" in n:
            chart = n["chart"]
            nodes.append(node_from_chart(n["id"], branches, chart["r"], chart["s"], chart["a"], chart["c"], n["w"]))
        else:
            nodes.append(ConstrainedNode(n["id"], branches, n["m1"], n["m2"], n["rho"], n["w"]))
    data = TransverseMapData(
        components=[Component(c["id"], c["multiplicity"], c.get("genus", 0), c.get("target")) for c in doc["components"]],
        nodes=nodes,
        free_nodes=[FreeNode(f["id"], f["branches"]) for f in doc.get("free_nodes", [])],
        markings=[
            ConstrainedMarking(m["id"], m["component"], m["m1"], m["m2"], m["w1"], m.get("rho"), m.get("smooth_point", True))
            for m in doc.get("markings", [])
        ],
        free_markings=[FreeMarking(m["id"], m["component"]) for m in doc.get("free_markings", [])],
        torsor=doc.get("torsor", "auto"),
        markings_complete=doc.get("markings_complete", True),
    )
    data.validate()
    return data


@dataclass(slots=True, frozen=True)
class BetaInput:
    beta: ClassBeta
    degree: DegreeData | None


def build_beta(doc: Mapping[str, Any]) -> BetaInput:
    legs = []
    for leg in doc["legs"]:
        point = None
        if "point" in leg:
            point = (leg["point"]["cell"], tuple(parse_rational(x) for x in leg["point"]["coords"]))
        legs.append(LegSpec(leg["id"], leg.get("cell"), tuple(leg["u"]) if "u" in leg else None, point))
    total = tuple(doc["total_class"]) if "total_class" in doc else None
    degree = build_degree(doc["degree"]) if "degree" in doc else None
    return BetaInput(ClassBeta(doc["genus"], legs, total), degree)


def type_to_document(t: CombType, decoration: Decoration | None = None) -> dict[str, Any]:
    """A ``type`` document for ``t``, accepted back by :func:`build_type`."""
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "kind": "type",
        "vertices": [{"id": v, "cell": t.vertex_cells[v], "genus": t.genus_of(v)} for v in t.graph.vertices],
        "edges": [
            {"id": e.id, "source": e.source, "target": e.target, "cell": t.edge_cells[e.id], "u": list(t.edge_u[e.id])}
            for e in t.graph.edges
        ],
        "legs": [{"id": leg.id, "vertex": leg.vertex, "cell": t.leg_cells[leg.id], "u": list(t.leg_u[leg.id])} for leg in t.graph.legs],
    }
    if decoration is not None:
        doc["decoration"] = {v: list(c) for v, c in decoration.classes.items()}
    return doc
