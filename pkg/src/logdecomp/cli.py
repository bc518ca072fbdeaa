"""Command-line interface for the decomposition toolkit."""

from __future__ import annotations

import logging
import sys
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any, Optional

import attrs
import structlog
import typer
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from .complex import delta_cells, slice as height_slice, toric_check, validate_base_map
from .config import Settings, get_settings
from .enhance import TorsorFlag, Verdict, enhancement_report, transverse_type
from .errors import ArgumentError, InternalError, LogDecompError, SchemaError, VerdictRefused
from .fixtures import Tag, all_fixtures, fixture_names, load_fixture, run_fixture
from .formats import (
    KINDS,
    ComplexInput,
    build_base_map,
    build_beta,
    build_complex,
    build_fan,
    build_ledger,
    build_transverse,
    build_type,
    dump_json,
    format_rational,
    read_document,
    schema_for,
    type_to_document,
)
from .monoid import basic_monoid
from .rich_logger import ExplainContext, explain
from .tropmap import (
    EnumerationCaps,
    balancing_defect,
    decomposition_terms,
    distribution_feasibility,
    enumerate_rigid_types,
    is_rigid,
    moduli_polyhedron,
    multiplicity,
    validate_map,
)

console = Console()
err_console = Console(stderr=True)
logger = structlog.get_logger("logdecomp.cli")

app = typer.Typer(help="Exact-arithmetic tools for logarithmic decomposition formulas.", no_args_is_help=True)
fixtures_app = typer.Typer(help="List and check the shipped worked examples", no_args_is_help=True)
app.add_typer(fixtures_app, name="fixtures")

_LOGGING_CONFIGURED = False

FormatOption = Annotated[Optional[str], typer.Option("--format", help="Output format: table or json (default from OUTPUT_FORMAT).")]
ExplainOption = Annotated[bool, typer.Option("--explain", help="Print every intermediate quantity to stderr.")]
ComplexArgument = Annotated[Path, typer.Argument(help="Complex or fan document.")]
TypeArgument = Annotated[Path, typer.Argument(help="Type document.")]


def _stderr_logger(*_args: Any) -> structlog.PrintLogger:
    return structlog.PrintLogger(file=sys.stderr)


def _configure_logging(settings: Settings) -> None:
    """Initialize structlog and stdlib logging formatting."""
    global _LOGGING_CONFIGURED
    if _LOGGING_CONFIGURED:
        return
    processors: list[Any] = [
        structlog.contextvars.merge_contextvars,
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.add_log_level,
        structlog.processors.format_exc_info,
    ]
    if settings.log_json_enabled:
        processors.append(structlog.processors.JSONRenderer())
    else:
        processors.append(structlog.processors.KeyValueRenderer(key_order=["event", "command", "status"]))
    level = getattr(logging, settings.log_level.upper(), logging.WARNING)
    structlog.configure(
        processors=processors,
        wrapper_class=structlog.make_filtering_bound_logger(level),
        logger_factory=_stderr_logger,
        cache_logger_on_first_use=False,
    )
    logging.basicConfig(level=level, stream=sys.stderr)
    _LOGGING_CONFIGURED = True


def _resolve_format(value: Optional[str]) -> str:
    fmt = (value or get_settings().output_format).strip().lower()
    if fmt not in {"table", "json"}:
        raise typer.BadParameter(f"unknown format {value!r}; use table or json", param_hint="--format")
    return fmt


def _print_error(exc: LogDecompError, fmt: str) -> None:
    if fmt == "json":
        typer.echo(dump_json(exc.to_payload()))
        return
    err_console.print(f"[red]{exc.error_type}[/]: {escape(str(exc))}")
    if exc.data:
        err_console.print(escape(dump_json(exc.data)), style="dim", highlight=False)


@contextmanager
def _command(name: str, fmt: str, *, inputs: dict[str, Any], explain_enabled: bool) -> Iterator[ExplainContext]:
    """Run a command body with logging context, an explain trace and error-to-exit-code mapping."""
    settings = get_settings()
    _configure_logging(settings)
    structlog.contextvars.bind_contextvars(command=name)
    try:
        with explain(name, inputs, enabled=explain_enabled, rich=settings.log_rich_enabled) as trace:
            yield trace
        logger.info("command.finished", status="ok")
    except LogDecompError as exc:
        logger.warning("command.failed", status=exc.error_type, message=str(exc))
        _print_error(exc, fmt)
        raise typer.Exit(code=exc.exit_code) from exc
    except (ArithmeticError, ValueError) as exc:
        logger.exception("command.crashed", status="INTERNAL", exception=type(exc).__name__)
        wrapped = InternalError(str(exc) or type(exc).__name__, data={"exception": type(exc).__name__})
        _print_error(wrapped, fmt)
        raise typer.Exit(code=wrapped.exit_code) from exc
    finally:
        structlog.contextvars.unbind_contextvars("command")


def _emit(payload: Any, fmt: str, table: Callable[[], Any]) -> None:
    if fmt == "json":
        typer.echo(dump_json(payload))
    else:
        console.print(table())


def _key_value_table(title: str, rows: dict[str, Any]) -> Table:
    table = Table(title=title)
    table.add_column("Quantity", style="cyan")
    table.add_column("Value")
    for key, value in rows.items():
        table.add_row(key, escape(_cell(value)))
    return table


def _cell(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_cell(v) for v in value) + "]"
    if isinstance(value, Fraction):
        return format_rational(value)
    return str(value)


def _load_complex(path: Path, *, need_rho: bool = True) -> ComplexInput:
    doc = read_document(path)
    if doc["kind"] not in {"complex", "fan"}:
        raise SchemaError(f"{path}: expected a complex or fan document, got {doc['kind']!r}")
    loaded = build_complex(doc)
    if need_rho and loaded.rho is None:
        raise ArgumentError(f"{path}: this command needs a base map (base_map or rho)")
    return loaded


def _load(path: Path, kind: str) -> dict[str, Any]:
    return read_document(path, kind)


# ---------------------------------------------------------------------------
# Complex commands
# ---------------------------------------------------------------------------


@app.command("validate-complex")
def validate_complex_cmd(
    complex_path: ComplexArgument,
    format: FormatOption = None,
    explain_flag: ExplainOption = False,
) -> None:
    """Check face closure, saturation and simplicity of a cone complex."""
    fmt = _resolve_format(format)
    with _command("validate-complex", fmt, inputs={"complex": str(complex_path)}, explain_enabled=explain_flag) as trace:
        loaded = _load_complex(complex_path, need_rho=False)
        payload = loaded.complex.report.to_dict()
        if loaded.rho is not None:
            validate_base_map(loaded.complex, loaded.rho)
            payload["delta_cells"] = delta_cells(loaded.complex, loaded.rho)
            poly = height_slice(loaded.complex, loaded.rho)
            trace.step(
                "height-one slice",
                {p.id: {"vertices": [list(v) for v in p.vertices], "recession": [list(r) for r in p.recession]} for p in poly.cells},
            )
        trace.result = payload
        _emit(payload, fmt, lambda: _key_value_table("Cone complex", payload))


@app.command("toric-check")
def toric_check_cmd(
    fan_path: Annotated[Path, typer.Argument(help="Fan document.")],
    m: Annotated[Optional[list[int]], typer.Option("--m", help="Character m; repeat once per coordinate (default: the fan's rho).")] = None,
    format: FormatOption = None,
    explain_flag: ExplainOption = False,
) -> None:
    """Compare ray multiplicities with the valuations of the monomial z^m."""
    fmt = _resolve_format(format)
    with _command("toric-check", fmt, inputs={"fan": str(fan_path), "m": m}, explain_enabled=explain_flag) as trace:
        doc = _load(fan_path, "fan")
        character = list(m) if m else doc.get("rho")
        if character is None:
            raise ArgumentError("no character given: pass --m or add rho to the fan")
        report = toric_check(build_fan(doc), character, build_base_map(doc))
        payload = report.to_dict()
        trace.step("character", character)
        trace.result = payload

        def table() -> Table:
            t = Table(title=f"Toric check (ok={report.ok})")
            for column in ("Ray", "Vector", "Multiplicity", "Valuation", "Agrees"):
                t.add_column(column)
            for r in report.rays:
                t.add_row(r.ray, _cell(r.vector), str(r.multiplicity), str(r.valuation), "yes" if r.agrees else "[red]no[/]")
            return t

        _emit(payload, fmt, table)


# ---------------------------------------------------------------------------
# Tropical map commands
# ---------------------------------------------------------------------------


@app.command("validate-map")
def validate_map_cmd(
    complex_path: ComplexArgument,
    map_path: Annotated[Path, typer.Argument(help="Type document with positions and lengths.")],
    format: FormatOption = None,
    explain_flag: ExplainOption = False,
) -> None:
    """Check a tropical map against cell membership, edge equations and balancing."""
    fmt = _resolve_format(format)
    with _command("validate-map", fmt, inputs={"complex": str(complex_path), "map": str(map_path)}, explain_enabled=explain_flag) as trace:
        loaded = _load_complex(complex_path)
        body = build_type(_load(map_path, "type"))
        if body.map is None:
            raise ArgumentError(f"{map_path}: a map needs positions and lengths")
        report = validate_map(body.map, loaded.complex, loaded.rho)  # type: ignore[arg-type]
        defects = {}
        for v in body.type.graph.vertices:
            defect = balancing_defect(body.map, v, loaded.complex)
            defects[v] = list(defect) if defect is not None else None
        trace.step("balancing defects", defects)
        payload = report.to_dict()
        trace.result = payload

        def table() -> Table:
            t = Table(title=f"Tropical map (valid={report.valid})")
            t.add_column("Condition", style="cyan")
            t.add_column("Element")
            t.add_column("Detail")
            for v in report.violations:
                t.add_row(v.condition, v.element, escape(v.detail))
            return t

        _emit(payload, fmt, table)


@app.command("rigid")
def rigid_cmd(
    complex_path: ComplexArgument,
    type_path: TypeArgument,
    format: FormatOption = None,
    explain_flag: ExplainOption = False,
) -> None:
    """Decide whether a type has a unique realization."""
    fmt = _resolve_format(format)
    with _command("rigid", fmt, inputs={"complex": str(complex_path), "type": str(type_path)}, explain_enabled=explain_flag) as trace:
        loaded = _load_complex(complex_path)
        body = build_type(_load(type_path, "type"))
        if explain_flag:
            trace.step("moduli", moduli_polyhedron(body.type, loaded.complex, loaded.rho, points=body.points).to_dict())  # type: ignore[arg-type]
        result = is_rigid(body.type, loaded.complex, loaded.rho, points=body.points, decoration=body.decoration)  # type: ignore[arg-type]
        payload = result.to_dict()
        trace.result = payload
        _emit(payload, fmt, lambda: _key_value_table("Rigidity", {"rigid": result.rigid, "dimension": result.dimension, "reason": result.reason}))


@app.command("multiplicity")
def multiplicity_cmd(
    complex_path: ComplexArgument,
    type_path: TypeArgument,
    format: FormatOption = None,
    explain_flag: ExplainOption = False,
) -> None:
    """Multiplicity of a rigid type: the least integer scaling its realization to an integral one."""
    fmt = _resolve_format(format)
    with _command("multiplicity", fmt, inputs={"complex": str(complex_path), "type": str(type_path)}, explain_enabled=explain_flag) as trace:
        loaded = _load_complex(complex_path)
        body = build_type(_load(type_path, "type"))
        result = is_rigid(body.type, loaded.complex, loaded.rho, points=body.points)  # type: ignore[arg-type]
        trace.step("rigidity", result.to_dict())
        m = multiplicity(body.type, loaded.complex, loaded.rho, points=body.points)  # type: ignore[arg-type]
        payload = {"multiplicity": m}
        trace.result = payload
        _emit(payload, fmt, lambda: _key_value_table("Multiplicity", payload))


@app.command("decompose")
def decompose_cmd(
    complex_path: ComplexArgument,
    ledger_path: Annotated[Path, typer.Argument(help="Ledger document.")],
    format: FormatOption = None,
    explain_flag: ExplainOption = False,
) -> None:
    """Weight each rigid type by m/|Aut| and sum the supplied counts."""
    fmt = _resolve_format(format)
    with _command("decompose", fmt, inputs={"complex": str(complex_path), "ledger": str(ledger_path)}, explain_enabled=explain_flag) as trace:
        loaded = _load_complex(complex_path)
        ledger_input = build_ledger(_load(ledger_path, "ledger"))
        ledger = decomposition_terms(
            ledger_input.entries,
            loaded.complex,
            loaded.rho,  # type: ignore[arg-type]
            total_class=ledger_input.total_class,
            degree=ledger_input.degree,
        )
        for note in ledger.notes:
            trace.step("note", note)
        payload = ledger.to_dict()
        trace.result = payload

        def table() -> Table:
            t = Table(title=f"Decomposition (total {format_rational(ledger.total)})")
            for column in ("Type", "m", "|Aut|", "m/|Aut|", "Count", "Contribution"):
                t.add_column(column, justify="right" if column != "Type" else "left")
            for row in ledger.rows:
                t.add_row(
                    row.label,
                    str(row.multiplicity),
                    str(row.automorphisms),
                    format_rational(row.coefficient),
                    format_rational(row.count),
                    format_rational(row.contribution),
                )
            return t

        _emit(payload, fmt, table)


@app.command("enumerate")
def enumerate_cmd(
    complex_path: ComplexArgument,
    beta_path: Annotated[Path, typer.Argument(help="Class document (genus, legs, optional total class).")],
    max_vertices: Annotated[Optional[int], typer.Option("--max-vertices", min=1, help="Vertex cap (default ENUM_MAX_VERTICES).")] = None,
    max_edges: Annotated[Optional[int], typer.Option("--max-edges", min=0, help="Edge cap (default ENUM_MAX_EDGES).")] = None,
    max_u: Annotated[Optional[int], typer.Option("--max-u", min=1, help="Contact-order cap (default ENUM_MAX_U).")] = None,
    point_legs: Annotated[Optional[list[str]], typer.Option("--point-leg", help="Leg pinned to a point; repeat to group counted legs.")] = None,
    counted_legs: Annotated[Optional[list[str]], typer.Option("--counted-leg", help="Leg whose vertex is tallied per pinned leg.")] = None,
    format: FormatOption = None,
    explain_flag: ExplainOption = False,
) -> None:
    """Enumerate rigid types of a class within the caps."""
    fmt = _resolve_format(format)
    with _command("enumerate", fmt, inputs={"complex": str(complex_path), "beta": str(beta_path)}, explain_enabled=explain_flag) as trace:
        loaded = _load_complex(complex_path)
        beta = build_beta(_load(beta_path, "beta"))
        defaults = EnumerationCaps.from_settings()
        caps = EnumerationCaps(
            max_vertices=max_vertices if max_vertices is not None else defaults.max_vertices,
            max_edges=max_edges if max_edges is not None else defaults.max_edges,
            max_u=max_u if max_u is not None else defaults.max_u,
        )
        trace.step("caps", {"max_vertices": caps.max_vertices, "max_edges": caps.max_edges, "max_u": caps.max_u})
        enumeration = enumerate_rigid_types(loaded.complex, loaded.rho, beta.beta, caps=caps, degree=beta.degree)  # type: ignore[arg-type]
        trace.step("examined", enumeration.examined)
        payload: dict[str, Any] = {
            "examined": enumeration.examined,
            "types": [
                {
                    "type": type_to_document(found.type),
                    "multiplicity": found.multiplicity,
                    "automorphisms": found.automorphisms,
                    "class_feasible": found.class_feasible,
                    "decorations": (
                        [{v: list(c) for v, c in d.classes.items()} for d in found.decorations] if found.decorations is not None else None
                    ),
                }
                for found in enumeration.types
            ],
        }
        if point_legs:
            verdicts = distribution_feasibility(enumeration, point_legs, counted_legs or [])
            payload["distributions"] = [{"counts": list(k), "feasible": ok} for k, ok in verdicts.items()]
        trace.result = {"types": len(enumeration.types), "examined": enumeration.examined}

        def table() -> Table:
            t = Table(title=f"Rigid types ({len(enumeration.types)} of {enumeration.examined} examined)")
            for column in ("#", "Vertices", "Edges", "m", "|Aut|", "Class"):
                t.add_column(column)
            for i, found in enumerate(enumeration.types):
                cells = ", ".join(f"{v}:{found.type.vertex_cells[v]}" for v in found.type.graph.vertices)
                edges = ", ".join(f"{e.id}:{_cell(found.type.edge_u[e.id])}" for e in found.type.graph.edges)
                t.add_row(str(i), cells, edges or "-", str(found.multiplicity), str(found.automorphisms), _cell(found.class_feasible))
            return t

        _emit(payload, fmt, table)


# ---------------------------------------------------------------------------
# Monoids and enhancements
# ---------------------------------------------------------------------------


@app.command("basic-monoid")
def basic_monoid_cmd(
    input_path: Annotated[Path, typer.Argument(help="Complex/fan document, or transverse data.")],
    type_path: Annotated[Optional[Path], typer.Argument(help="Type document (omit for transverse data).")] = None,
    format: FormatOption = None,
    explain_flag: ExplainOption = False,
) -> None:
    """Basic monoid of a type, with its Hilbert basis and the image of the base map."""
    fmt = _resolve_format(format)
    inputs = {"input": str(input_path), "type": str(type_path) if type_path else None}
    with _command("basic-monoid", fmt, inputs=inputs, explain_enabled=explain_flag) as trace:
        doc = read_document(input_path)
        if doc["kind"] == "transverse":
            if type_path is not None:
                raise ArgumentError("transverse data already determines the type; drop the TYPE argument")
            complex_, rho, t = transverse_type(build_transverse(doc))
            trace.step("forced type", type_to_document(t))
        else:
            if type_path is None:
                raise ArgumentError("a TYPE document is required with a complex")
            loaded = _load_complex(input_path)
            complex_, rho, t = loaded.complex, loaded.rho, build_type(_load(type_path, "type")).type
        basic = basic_monoid(t, complex_, rho)
        trace.step("dual cone", basic.dual.to_dict())
        payload = basic.to_dict()
        trace.result = payload

        def table() -> Table:
            return _key_value_table(
                "Basic monoid",
                {
                    "rank": basic.monoid.rank,
                    "free": basic.is_free,
                    "generators": [list(g) for g in basic.monoid.generators],
                    "base map": basic.base_map,
                    "base coefficients": basic.base_coefficients,
                },
            )

        _emit(payload, fmt, table)


@app.command("enhance-count")
def enhance_count_cmd(
    transverse_path: Annotated[Path, typer.Argument(help="Transverse data document.")],
    torsor: Annotated[Optional[TorsorFlag], typer.Option("--torsor", help="Override the torsor flag of the document.")] = None,
    format: FormatOption = None,
    explain_flag: ExplainOption = False,
) -> None:
    """Count log enhancements of a transverse map, or refuse with a reason."""
    fmt = _resolve_format(format)
    inputs = {"transverse": str(transverse_path), "torsor": torsor.value if torsor else None}
    with _command("enhance-count", fmt, inputs=inputs, explain_enabled=explain_flag) as trace:
        data = build_transverse(_load(transverse_path, "transverse"))
        if torsor is not None:
            data = attrs.evolve(data, torsor=torsor)
        report = enhancement_report(data)
        for node in report.nodes:
            trace.step(f"node {node.id}", node.to_dict())
        trace.step("base order b", report.base_order)
        trace.step("group", report.group.to_dict())
        trace.step("torsor", report.torsor.value)
        payload = report.to_dict()
        trace.result = payload
        if report.result.verdict is Verdict.REFUSED:
            raise VerdictRefused(report.result.reason, data={"report": payload})

        def table() -> Table:
            t = Table(title=f"Enhancements: {report.result.verdict.value}")
            for column in ("Node", "Ind", "λ", "u", "w̄", "e"):
                t.add_column(column)
            for node in report.nodes:
                row = node.to_dict()
                t.add_row(node.id, _cell(row["index"]), _cell(row["lambda"]), _cell(row["u"]), _cell(row["w_bar"]), _cell(row["e"]))
            t.caption = f"b={_cell(report.base_order)} |G|={report.group.order} count={_cell(report.result.count)}"
            return t

        _emit(payload, fmt, table)


# ---------------------------------------------------------------------------
# Fixtures and schemas
# ---------------------------------------------------------------------------


@fixtures_app.command("list")
def fixtures_list(format: FormatOption = None) -> None:
    """List the shipped worked examples."""
    fmt = _resolve_format(format)
    with _command("fixtures list", fmt, inputs={}, explain_enabled=False):
        fixtures = all_fixtures()
        payload = [{"name": f.name, "description": f.description, "checks": len(f.checks)} for f in fixtures]

        def table() -> Table:
            t = Table(title="Fixtures")
            t.add_column("Name", style="cyan")
            t.add_column("Checks", justify="right")
            t.add_column("Description")
            for f in fixtures:
                t.add_row(f.name, str(len(f.checks)), escape(f.description))
            return t

        _emit(payload, fmt, table)


@fixtures_app.command("check")
def fixtures_check(
    name: Annotated[Optional[str], typer.Argument(help="Fixture to check (default: all).")] = None,
    tag: Annotated[Optional[list[Tag]], typer.Option("--tag", help="Only run checks with this provenance tag.")] = None,
    format: FormatOption = None,
    explain_flag: ExplainOption = False,
) -> None:
    """Evaluate fixture checks against their expected values; exit 1 on any mismatch."""
    fmt = _resolve_format(format)
    with _command("fixtures check", fmt, inputs={"name": name}, explain_enabled=explain_flag) as trace:
        fixtures = [load_fixture(name)] if name else [load_fixture(n) for n in fixture_names()]
        tags = set(tag) if tag else None
        results = [r for f in fixtures for r in run_fixture(f, tags=tags)]
        failed = [r for r in results if not r.passed]
        for r in failed:
            trace.step(f"{r.fixture}/{r.check}", r.to_dict())
        payload = {"checked": len(results), "failed": len(failed), "results": [r.to_dict() for r in results]}
        trace.result = {"checked": len(results), "failed": len(failed)}

        def table() -> Table:
            t = Table(title=f"Fixture checks ({len(results) - len(failed)}/{len(results)} passed)")
            for column in ("Fixture", "Check", "Tag", "Expected", "Actual", "Status"):
                t.add_column(column)
            for r in results:
                status = "[green]ok[/]" if r.passed else f"[red]FAIL[/] {escape(r.error or '')}"
                t.add_row(r.fixture, r.check, r.tag.value, escape(dump_json(r.expected)), escape(dump_json(r.actual)), status)
            return t

        _emit(payload, fmt, table)
    if failed:
        raise typer.Exit(code=1)


@app.command("schema")
def schema_cmd(kind: Annotated[str, typer.Argument(help=f"Document kind: {', '.join(KINDS)}.")]) -> None:
    """Print the JSON schema of a document kind."""
    with _command("schema", "json", inputs={"kind": kind}, explain_enabled=False):
        typer.echo(dump_json(schema_for(kind)))


if __name__ == "__main__":  # pragma: no cover
    app()
