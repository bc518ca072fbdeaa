from __future__ import annotations

import orjson
from typer.testing import CliRunner

from logdecomp.cli import app
from logdecomp.errors import CapabilityError
from logdecomp.fixtures import CheckResult, Tag


def _json(result):
    return orjson.loads(result.stdout)


def test_cli_validate_complex_json(isolated_env, fixture_path):
    runner = CliRunner()
    result = runner.invoke(app, ["validate-complex", str(fixture_path("interval", "complex.json"))])
    assert result.exit_code == 0
    payload = _json(result)
    assert payload["classification"] == "simple"
    assert payload["ok"] is True
    assert payload["delta_cells"] == ["r1", "r2", "Q"]


def test_cli_validate_complex_table(isolated_env, fixture_path):
    runner = CliRunner()
    result = runner.invoke(app, ["validate-complex", str(fixture_path("interval", "complex.json")), "--format", "table"])
    assert result.exit_code == 0
    assert "Cone complex" in result.stdout
    assert "simple" in result.stdout


def test_cli_rejects_unknown_format(isolated_env, fixture_path):
    runner = CliRunner()
    result = runner.invoke(app, ["validate-complex", str(fixture_path("interval", "complex.json")), "--format", "xml"])
    assert result.exit_code == 2


def test_cli_explain_writes_the_trace(isolated_env, fixture_path):
    runner = CliRunner()
    result = runner.invoke(app, ["validate-complex", str(fixture_path("interval", "complex.json")), "--explain"])
    assert result.exit_code == 0
    assert "height-one slice" in result.output
    assert "explain: validate-complex" in result.output


def test_cli_wrong_document_kind_is_a_schema_error(isolated_env, fixture_path):
    runner = CliRunner()
    result = runner.invoke(app, ["validate-complex", str(fixture_path("interval", "rigid_type.json"))])
    assert result.exit_code == 2
    assert _json(result)["error"]["type"] == "SCHEMA"


def test_cli_toric_check(isolated_env, fixture_path):
    runner = CliRunner()
    result = runner.invoke(app, ["toric-check", str(fixture_path("toric_plane", "fan.json"))])
    assert result.exit_code == 0
    payload = _json(result)
    assert payload["ok"] is True
    assert [r["multiplicity"] for r in payload["rays"]] == [1, 2, 3, 1]


def test_cli_toric_check_with_another_character(isolated_env, fixture_path):
    runner = CliRunner()
    result = runner.invoke(app, ["toric-check", str(fixture_path("toric_plane", "fan.json")), "--m=1", "--m=-1"])
    assert result.exit_code == 0
    payload = _json(result)
    assert payload["ok"] is False
    assert payload["nonnegative"] is False


def test_cli_validate_map(isolated_env, fixture_path):
    runner = CliRunner()
    result = runner.invoke(
        app, ["validate-map", str(fixture_path("interval", "complex.json")), str(fixture_path("interval", "stretched_map.json"))]
    )
    assert result.exit_code == 0
    payload = _json(result)
    assert payload["valid"] is False
    assert payload["violations"][0]["condition"] == "edge-segment"


def test_cli_rigid_and_multiplicity(isolated_env, fixture_path):
    runner = CliRunner()
    complex_path = str(fixture_path("cubic_pencil", "fan.json"))
    type_path = str(fixture_path("cubic_pencil", "interior_type.json"))

    rigid = runner.invoke(app, ["rigid", complex_path, type_path])
    assert rigid.exit_code == 0
    assert _json(rigid)["rigid"] is True

    result = runner.invoke(app, ["multiplicity", complex_path, type_path])
    assert result.exit_code == 0
    assert _json(result) == {"multiplicity": 3}


def test_cli_multiplicity_of_a_moving_type(isolated_env, fixture_path):
    runner = CliRunner()
    result = runner.invoke(
        app, ["multiplicity", str(fixture_path("interval", "complex.json")), str(fixture_path("interval", "contracted_type.json"))]
    )
    assert result.exit_code == 2
    error = _json(result)["error"]
    assert error["type"] == "ARGUMENT"
    assert error["data"]["reason"] == "moves in a positive-dimensional family"


def test_cli_decompose(isolated_env, fixture_path):
    runner = CliRunner()
    result = runner.invoke(
        app, ["decompose", str(fixture_path("cubic_pencil", "fan.json")), str(fixture_path("cubic_pencil", "ledger.json"))]
    )
    assert result.exit_code == 0
    payload = _json(result)
    assert payload["total"] == "12"
    assert [row["contribution"] for row in payload["rows"]] == ["9", "3"]


def test_cli_enumerate(isolated_env, fixture_path, tmp_path):
    beta = tmp_path / "beta.json"
    beta.write_bytes(orjson.dumps({"schema_version": 1, "kind": "beta", "genus": 0, "legs": []}))
    runner = CliRunner()
    result = runner.invoke(
        app,
        [
            "enumerate",
            str(fixture_path("interval", "complex.json")),
            str(beta),
            "--max-vertices",
            "2",
            "--max-edges",
            "1",
            "--max-u",
            "1",
        ],
    )
    assert result.exit_code == 0
    payload = _json(result)
    assert len(payload["types"]) == 3
    assert all(t["multiplicity"] == 1 for t in payload["types"])
    assert "distributions" not in payload


def test_cli_basic_monoid_from_transverse_data(isolated_env, fixture_path):
    runner = CliRunner()
    result = runner.invoke(app, ["basic-monoid", str(fixture_path("cubic_pencil", "exceptional.json"))])
    assert result.exit_code == 0
    payload = _json(result)
    assert payload["rank"] == 1
    assert payload["free"] is True
    assert payload["base_coefficients"] == [3]


def test_cli_basic_monoid_needs_a_type_with_a_complex(isolated_env, fixture_path):
    runner = CliRunner()
    result = runner.invoke(app, ["basic-monoid", str(fixture_path("interval", "complex.json"))])
    assert result.exit_code == 2


def test_cli_capability_errors_exit_3(isolated_env, fixture_path, monkeypatch):
    def over_cap(*_args, **_kwargs):
        raise CapabilityError("Hilbert basis of a rank-5 cone exceeds the rank cap 3")

    monkeypatch.setattr("logdecomp.cli.basic_monoid", over_cap)
    runner = CliRunner()
    result = runner.invoke(
        app, ["basic-monoid", str(fixture_path("interval", "complex.json")), str(fixture_path("interval", "rigid_type.json"))]
    )
    assert result.exit_code == 3
    error = _json(result)["error"]
    assert error["type"] == "CAPABILITY"
    assert error["recoverable"] is True


def test_cli_enhance_count_refuses_without_torsor_flag(isolated_env, fixture_path):
    runner = CliRunner()
    result = runner.invoke(app, ["enhance-count", str(fixture_path("multiple_fibre", "cycle.json"))])
    assert result.exit_code == 4
    error = _json(result)["error"]
    assert error["type"] == "VERDICT_REFUSED"
    assert error["data"]["report"]["group"]["order"] == 2


def test_cli_enhance_count_with_torsor_flag(isolated_env, fixture_path):
    runner = CliRunner()
    result = runner.invoke(app, ["enhance-count", str(fixture_path("multiple_fibre", "cycle.json")), "--torsor", "yes"])
    assert result.exit_code == 0
    payload = _json(result)
    assert payload["verdict"] == "counted"
    assert payload["count"] == 1


def test_cli_enhance_count_table(isolated_env, fixture_path):
    runner = CliRunner()
    result = runner.invoke(app, ["enhance-count", str(fixture_path("cubic_pencil", "exceptional.json")), "--format", "table"])
    assert result.exit_code == 0
    assert "Enhancements: counted" in result.stdout


def test_cli_fixtures_list(isolated_env):
    runner = CliRunner()
    result = runner.invoke(app, ["fixtures", "list"])
    assert result.exit_code == 0
    names = [f["name"] for f in _json(result)]
    assert "interval" in names
    assert "multiple_fibre" in names


def test_cli_fixtures_check_by_tag(isolated_env):
    runner = CliRunner()
    result = runner.invoke(app, ["fixtures", "check", "interval", "--tag", "PUBLISHED"])
    assert result.exit_code == 0
    payload = _json(result)
    assert payload["checked"] == 4
    assert payload["failed"] == 0


def test_cli_fixtures_check_exits_1_on_mismatch(isolated_env, monkeypatch):
    def failing(fixture, *, tags=None):
        return [CheckResult(fixture.name, "forced", "rigid", Tag.TRIVIAL, True, False, False)]

    monkeypatch.setattr("logdecomp.cli.run_fixture", failing)
    runner = CliRunner()
    result = runner.invoke(app, ["fixtures", "check", "interval"])
    assert result.exit_code == 1
    assert _json(result)["failed"] == 1


def test_cli_fixtures_check_unknown_name(isolated_env):
    runner = CliRunner()
    result = runner.invoke(app, ["fixtures", "check", "klein_bottle"])
    assert result.exit_code == 2


def test_cli_schema(isolated_env):
    runner = CliRunner()
    result = runner.invoke(app, ["schema", "transverse"])
    assert result.exit_code == 0
    schema = _json(result)
    assert schema["$schema"] == "https://json-schema.org/draft/2020-12/schema"
    assert schema["properties"]["kind"] == {"const": "transverse"}


def test_cli_schema_unknown_kind(isolated_env):
    runner = CliRunner()
    result = runner.invoke(app, ["schema", "polytope"])
    assert result.exit_code == 2


def test_cli_toric_check_with_declared_charts(isolated_env, tmp_path):
    fan = {
        "schema_version": 1,
        "kind": "fan",
        "rank": 2,
        "rays": [{"name": "r1", "vector": [1, 0]}, {"name": "r2", "vector": [0, 1]}],
        "cones": [["r1", "r2"]],
        "rho": [2, 3],
        "base_map": {"0": [], "r1": [2], "r2": [4], "r1+r2": [2, 3]},
    }
    path = tmp_path / "fan.json"
    path.write_bytes(orjson.dumps(fan))
    runner = CliRunner()
    result = runner.invoke(app, ["toric-check", str(path)])
    assert result.exit_code == 0
    payload = _json(result)
    assert payload["ok"] is False
    assert [(r["ray"], r["multiplicity"], r["valuation"]) for r in payload["rays"]] == [("r1", 2, 2), ("r2", 4, 3)]


def test_cli_arithmetic_failures_exit_5(isolated_env, fixture_path, monkeypatch):
    def broken(*_args, **_kwargs):
        raise ArithmeticError("enhancement count is not divisible by the group order")

    monkeypatch.setattr("logdecomp.cli.basic_monoid", broken)
    runner = CliRunner()
    result = runner.invoke(
        app, ["basic-monoid", str(fixture_path("interval", "complex.json")), str(fixture_path("interval", "rigid_type.json"))]
    )
    assert result.exit_code == 5
    error = _json(result)["error"]
    assert error["type"] == "INTERNAL"
    assert error["recoverable"] is False
    assert error["data"] == {"exception": "ArithmeticError"}
    assert "not divisible" in error["message"]


def test_cli_zero_division_exits_5_in_table_mode(isolated_env, fixture_path, monkeypatch):
    def broken(*_args, **_kwargs):
        raise ZeroDivisionError("singular matrix")

    monkeypatch.setattr("logdecomp.cli.toric_check", broken)
    runner = CliRunner()
    result = runner.invoke(app, ["toric-check", str(fixture_path("toric_plane", "fan.json")), "--format", "table"])
    assert result.exit_code == 5
    assert "INTERNAL" in result.output


def test_cli_value_errors_exit_5(isolated_env, fixture_path, monkeypatch):
    def broken(*_args, **_kwargs):
        raise ValueError("ragged matrix: expected 2 columns, got 1")

    monkeypatch.setattr("logdecomp.cli.delta_cells", broken)
    runner = CliRunner()
    result = runner.invoke(app, ["validate-complex", str(fixture_path("interval", "complex.json"))])
    assert result.exit_code == 5
    assert _json(result)["error"]["data"] == {"exception": "ValueError"}
