"""Packaged worked examples and the checks that pin their numbers.

Every check carries a tag: ``PUBLISHED`` values appear in the literature,
``TRIVIAL`` ones follow from the definitions, and ``DERIVED`` ones were
computed by hand from the published data.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from importlib import resources
from importlib.abc import Traversable
from typing import Any

import attrs
import orjson
import structlog

from .complex import ray_multiplicity, toric_check
from .enhance import (
    TorsorFlag,
    TransverseMapData,
    base_order,
    enhancement_count,
    group_order,
    torsor_nonempty,
    transverse_type,
)
from .errors import ArgumentError, LogDecompError, SchemaError
from .formats import (
    ComplexInput,
    TypeInput,
    build_base_map,
    build_beta,
    build_complex,
    build_fan,
    build_ledger,
    build_transverse,
    build_type,
    format_rational,
    validate_document,
)
from .monoid import basic_monoid
from .tropmap import (
    EnumerationCaps,
    balancing_defect,
    decomposition_terms,
    distribution_feasibility,
    enumerate_rigid_types,
    is_rigid,
    multiplicity,
    validate_map,
)

logger = structlog.get_logger("logdecomp.fixtures")

_PACKAGE = "logdecomp.fixture_data"


class Tag(str, Enum):
    PUBLISHED = "PUBLISHED"
    TRIVIAL = "TRIVIAL"
    DERIVED = "DERIVED"


@dataclass(slots=True, frozen=True)
class FixtureCheck:
    id: str
    op: str
    inputs: Mapping[str, str]
    expected: Any
    tag: Tag
    params: Mapping[str, Any] = field(default_factory=dict)


@dataclass(slots=True, frozen=True)
class Fixture:
    name: str
    description: str
    checks: tuple[FixtureCheck, ...]
    root: Traversable

    def read(self, filename: str) -> dict[str, Any]:
        node = self.root / filename
        try:
            raw = orjson.loads(node.read_bytes())
        except FileNotFoundError as exc:
            raise SchemaError(f"fixture {self.name!r} has no file {filename!r}") from exc
        return validate_document(raw)


def fixture_names() -> list[str]:
    root = resources.files(_PACKAGE)
    return sorted(child.name for child in root.iterdir() if child.is_dir() and (child / "fixture.json").is_file())


def load_fixture(name: str) -> Fixture:
    root = resources.files(_PACKAGE) / name
    manifest = root / "fixture.json"
    if not manifest.is_file():
        raise ArgumentError(f"unknown fixture {name!r}", data={"fixtures": fixture_names()})
    doc = validate_document(orjson.loads(manifest.read_bytes()), "fixture")
    checks = tuple(
        FixtureCheck(
            id=c["id"],
            op=c["op"],
            inputs=c["inputs"],
            expected=c["expected"],
            tag=Tag(c["tag"]),
            params=c.get("params", {}),
        )
        for c in doc["checks"]
    )
    return Fixture(name=doc["name"], description=doc.get("description", ""), checks=checks, root=root)


def all_fixtures() -> list[Fixture]:
    return [load_fixture(name) for name in fixture_names()]


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


@dataclass(slots=True, frozen=True)
class CheckResult:
    fixture: str
    check: str
    op: str
    tag: Tag
    expected: Any
    actual: Any
    passed: bool
    error: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "fixture": self.fixture,
            "check": self.check,
            "op": self.op,
            "tag": self.tag.value,
            "expected": self.expected,
            "actual": self.actual,
            "passed": self.passed,
            "error": self.error,
        }


def _plain(value: Any) -> Any:
    """Comparable JSON-like form: integral rationals become ints, others "p/q" strings."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else format_rational(value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, Mapping):
        return {k: _plain(v) for k, v in value.items()}
    return value


class _Context:
    def __init__(self, fixture: Fixture, check: FixtureCheck) -> None:
        self.fixture = fixture
        self.check = check

    def doc(self, role: str) -> dict[str, Any]:
        try:
            filename = self.check.inputs[role]
        except KeyError as exc:
            raise ArgumentError(f"check {self.check.id!r} needs a {role!r} input") from exc
        return self.fixture.read(filename)

    def complex(self) -> ComplexInput:
        return build_complex(self.doc("complex"))

    def type(self) -> TypeInput:
        return build_type(self.doc("type"))

    def transverse(self) -> TransverseMapData:
        data = build_transverse(self.doc("transverse"))
        if "torsor" in self.check.params:
            data = attrs.evolve(data, torsor=TorsorFlag(self.check.params["torsor"]))
        return data

    def param(self, name: str) -> Any:
        try:
            return self.check.params[name]
        except KeyError as exc:
            raise ArgumentError(f"check {self.check.id!r} needs parameter {name!r}") from exc


def _require_rho(ctx: _Context) -> ComplexInput:
    loaded = ctx.complex()
    if loaded.rho is None:
        raise ArgumentError(f"check {ctx.check.id!r} needs a complex with a base map")
    return loaded


def _op_validate_complex(ctx: _Context) -> Any:
    return ctx.complex().complex.report.classification


def _op_rigid(ctx: _Context) -> Any:
    loaded = _require_rho(ctx)
    body = ctx.type()
    return is_rigid(body.type, loaded.complex, loaded.rho, points=body.points).rigid  # type: ignore[arg-type]


def _op_multiplicity(ctx: _Context) -> Any:
    loaded = _require_rho(ctx)
    body = ctx.type()
    return multiplicity(body.type, loaded.complex, loaded.rho, points=body.points)  # type: ignore[arg-type]


def _op_validate_map(ctx: _Context) -> Any:
    loaded = _require_rho(ctx)
    body = ctx.type()
    if body.map is None:
        raise ArgumentError(f"check {ctx.check.id!r} needs positions and lengths")
    report = validate_map(body.map, loaded.complex, loaded.rho)  # type: ignore[arg-type]
    return {"valid": report.valid, "first": report.first.condition if report.first else None}


def _op_balancing(ctx: _Context) -> Any:
    loaded = ctx.complex()
    body = ctx.type()
    if body.map is None:
        raise ArgumentError(f"check {ctx.check.id!r} needs positions and lengths")
    return balancing_defect(body.map, ctx.param("vertex"), loaded.complex)


def _op_ledger_total(ctx: _Context) -> Any:
    loaded = _require_rho(ctx)
    ledger = build_ledger(ctx.doc("ledger"))
    result = decomposition_terms(
        ledger.entries, loaded.complex, loaded.rho, total_class=ledger.total_class, degree=ledger.degree  # type: ignore[arg-type]
    )
    return result.total


def _op_base_order(ctx: _Context) -> Any:
    return base_order(ctx.transverse())


def _op_group_order(ctx: _Context) -> Any:
    return group_order(ctx.transverse()).order


def _op_torsor(ctx: _Context) -> Any:
    return torsor_nonempty(ctx.transverse()).value


def _op_enhancement_count(ctx: _Context) -> Any:
    result = enhancement_count(ctx.transverse())
    return {"verdict": result.verdict.value, "count": result.count}


def _op_basic_monoid(ctx: _Context) -> Any:
    if "transverse" in ctx.check.inputs:
        complex_, rho, t = transverse_type(ctx.transverse())
    else:
        loaded = _require_rho(ctx)
        complex_, rho, t = loaded.complex, loaded.rho, ctx.type().type
    basic = basic_monoid(t, complex_, rho)
    coefficients = list(basic.base_coefficients) if basic.base_coefficients is not None else None
    return {"rank": basic.monoid.rank, "free": basic.is_free, "base_coefficients": coefficients}


def _op_ray_multiplicity(ctx: _Context) -> Any:
    loaded = _require_rho(ctx)
    return ray_multiplicity(loaded.complex, loaded.rho, ctx.param("ray"))  # type: ignore[arg-type]


def _op_toric_check(ctx: _Context) -> Any:
    doc = ctx.doc("complex")
    if doc["kind"] != "fan" or "rho" not in doc:
        raise ArgumentError(f"check {ctx.check.id!r} needs a fan with a covector")
    return toric_check(build_fan(doc), doc["rho"], build_base_map(doc)).ok


def _op_enumerate(ctx: _Context) -> Any:
    loaded = _require_rho(ctx)
    beta = build_beta(ctx.doc("beta"))
    caps_param = ctx.check.params.get("caps")
    caps = EnumerationCaps(**caps_param) if caps_param else None
    enumeration = enumerate_rigid_types(loaded.complex, loaded.rho, beta.beta, caps=caps, degree=beta.degree)  # type: ignore[arg-type]
    verdicts = distribution_feasibility(enumeration, ctx.param("point_legs"), ctx.param("counted_legs"))
    return {
        "feasible": [list(k) for k, ok in verdicts.items() if ok],
        "infeasible": [list(k) for k, ok in verdicts.items() if not ok],
    }


OPS: dict[str, Callable[[_Context], Any]] = {
    "validate_complex": _op_validate_complex,
    "rigid": _op_rigid,
    "multiplicity": _op_multiplicity,
    "validate_map": _op_validate_map,
    "balancing": _op_balancing,
    "ledger_total": _op_ledger_total,
    "base_order": _op_base_order,
    "group_order": _op_group_order,
    "torsor": _op_torsor,
    "enhancement_count": _op_enhancement_count,
    "basic_monoid": _op_basic_monoid,
    "ray_multiplicity": _op_ray_multiplicity,
    "toric_check": _op_toric_check,
    "enumerate": _op_enumerate,
}


def evaluate_check(fixture: Fixture, check: FixtureCheck) -> CheckResult:
    op = OPS.get(check.op)
    if op is None:
        raise ArgumentError(f"check {check.id!r} uses unknown operation {check.op!r}", data={"ops": sorted(OPS)})
    error = None
    try:
        actual = _plain(op(_Context(fixture, check)))
    except (LogDecompError, ArithmeticError) as exc:
        actual = None
        error = str(exc)
    expected = _plain(check.expected)
    passed = error is None and actual == expected
    logger.debug("fixture.check", fixture=fixture.name, check=check.id, passed=passed)
    return CheckResult(fixture.name, check.id, check.op, check.tag, expected, actual, passed, error)


def run_fixture(fixture: Fixture, *, tags: set[Tag] | None = None) -> list[CheckResult]:
    return [evaluate_check(fixture, c) for c in fixture.checks if tags is None or c.tag in tags]
