from __future__ import annotations

import pytest

from logdecomp.errors import ArgumentError
from logdecomp.rich_logger import ExplainContext, explain, render_explain_panel


def test_steps_are_dropped_when_disabled():
    ctx = ExplainContext(command="rigid", inputs={})

    ctx.step("moduli", {"dimension": 0})

    assert ctx.steps == []


def test_rendered_panel_lists_steps_and_result():
    ctx = ExplainContext(command="multiplicity", inputs={"type": "t.json"}, enabled=True)
    ctx.step("rigidity", {"rigid": True, "dimension": 0})
    ctx.result = {"multiplicity": 3}

    text = render_explain_panel(ctx)

    assert "explain: multiplicity" in text
    assert "rigidity" in text
    assert "t.json" in text
    assert '"multiplicity": 3' in text


def test_explain_records_failures(capsys):
    with pytest.raises(ArgumentError):
        with explain("multiplicity", {"type": "t.json"}, enabled=True, rich=False) as ctx:
            raise ArgumentError("multiplicity is only defined for rigid types")

    assert not ctx.success
    assert isinstance(ctx.error, ArgumentError)
    captured = capsys.readouterr()
    assert "ARGUMENT" in captured.err
    assert captured.out == ""
