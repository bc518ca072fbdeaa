"""Rich rendering of ``--explain`` traces.

Commands record their intermediate quantities on an :class:`ExplainContext`;
when explanation is enabled the trace is printed to stderr as a panel, so
stdout keeps carrying only the command's result.
"""

from __future__ import annotations

import io
import time
from collections.abc import Iterator
from contextlib import contextmanager, suppress
from dataclasses import dataclass, field
from typing import Any

from rich import box
from rich.console import Console, Group
from rich.markup import escape
from rich.panel import Panel
from rich.rule import Rule
from rich.syntax import Syntax
from rich.table import Table
from rich.text import Text
from rich.tree import Tree

from .formats import dump_json

console = Console(stderr=True, soft_wrap=True)


@dataclass
class ExplainContext:
    """Trace of one command invocation."""

    command: str
    inputs: dict[str, Any]
    enabled: bool = False
    steps: list[tuple[str, Any]] = field(default_factory=list)
    start_time: float = field(default_factory=time.perf_counter)
    end_time: float | None = None
    result: Any = None
    error: Exception | None = None
    success: bool = True

    def step(self, title: str, data: Any) -> None:
        if self.enabled:
            self.steps.append((title, data))

    @property
    def duration_ms(self) -> float:
        end = self.end_time if self.end_time else time.perf_counter()
        return (end - self.start_time) * 1000


def _safe_json_format(data: Any, max_length: int = 4000) -> str:
    try:
        text = dump_json(data)
    except TypeError:
        text = repr(data)
    if len(text) > max_length:
        text = text[:max_length] + "\n... (truncated)"
    return text


def _create_syntax_panel(title: str, content: str, border_style: str = "cyan") -> Panel:
    syntax = Syntax(content, "json", theme="monokai", line_numbers=False, word_wrap=True, background_color="default")
    return Panel(syntax, title=f"[bold]{title}[/bold]", border_style=border_style, box=box.ROUNDED, padding=(0, 1))


def _plain_tree_value(value: Any) -> str:
    if isinstance(value, (dict, list, tuple)):
        return _safe_json_format(value, max_length=200)
    return str(value)


def create_data_tree(data: Any, root_label: str) -> Tree:
    """Tree view of nested step data."""
    tree = Tree(f"[bold bright_white]{escape(root_label)}[/bold bright_white]")

    def add_items(parent: Tree, items: Any) -> None:
        if isinstance(items, dict):
            for key, value in items.items():
                if isinstance(value, (dict, list)) and value:
                    branch = parent.add(f"[bold bright_cyan]{escape(str(key))}[/bold bright_cyan]")
                    add_items(branch, value)
                else:
                    parent.add(f"[bright_yellow]{escape(str(key))}[/bright_yellow]: {escape(_plain_tree_value(value))}")
        elif isinstance(items, list):
            for i, item in enumerate(items):
                if isinstance(item, (dict, list)) and item:
                    add_items(parent.add(f"[dim]{i}[/dim]"), item)
                else:
                    parent.add(f"[dim]{i}:[/dim] {escape(_plain_tree_value(item))}")
        else:
            parent.add(escape(_plain_tree_value(items)))

    add_items(tree, data)
    return tree


def _create_summary_table(ctx: ExplainContext) -> Table:
    table = Table(show_header=False, box=box.SIMPLE, padding=(0, 1), show_edge=False)
    table.add_column("Key", style="bold bright_yellow", width=12)
    table.add_column("Value", overflow="fold")
    table.add_row("Command", f"[bold bright_green]{escape(ctx.command)}[/bold bright_green]")
    for key, value in ctx.inputs.items():
        table.add_row(key, escape(str(value)))
    if ctx.end_time:
        table.add_row("Duration", f"{ctx.duration_ms:.2f}ms")
        status = "[bold bright_green]OK[/bold bright_green]" if ctx.success else "[bold bright_red]FAILED[/bold bright_red]"
        table.add_row("Status", status)
    return table


def _create_result_display(ctx: ExplainContext) -> Panel:
    if ctx.error is not None:
        info: dict[str, Any] = {"error_type": getattr(ctx.error, "error_type", type(ctx.error).__name__), "message": str(ctx.error)}
        data = getattr(ctx.error, "data", None)
        if data:
            info["data"] = data
        return _create_syntax_panel("Error", _safe_json_format(info), border_style="bright_red")
    return _create_syntax_panel("Result", _safe_json_format(ctx.result), border_style="bright_green")


def build_explain_panel(ctx: ExplainContext) -> Panel:
    components: list[Any] = [_create_summary_table(ctx)]
    for title, data in ctx.steps:
        components.append(Rule(style="bright_blue"))
        components.append(create_data_tree(data, title))
    components.append(Text())
    components.append(_create_result_display(ctx))
    border = "bright_green" if ctx.success else "bright_red"
    return Panel(
        Group(*components),
        title=f"[bold]explain: {escape(ctx.command)}[/bold]",
        border_style=border,
        box=box.DOUBLE,
        padding=(1, 2),
    )


def render_explain_panel(ctx: ExplainContext) -> str:
    """Render the trace to plain text without printing it."""
    capture = Console(file=io.StringIO(), record=True, color_system=None, width=120)
    capture.print(build_explain_panel(ctx))
    return capture.export_text(clear=True)


@contextmanager
def explain(
    command: str, inputs: dict[str, Any] | None = None, *, enabled: bool = False, rich: bool = True
) -> Iterator[ExplainContext]:
    """Collect a trace for ``command`` and print it on exit when ``enabled``.

    With ``rich`` off the panel is rendered to plain text first, for logs and pipes.
    """
    ctx = ExplainContext(command=command, inputs=inputs or {}, enabled=enabled)
    try:
        yield ctx
        ctx.success = True
    except Exception as exc:
        ctx.error = exc
        ctx.success = False
        raise
    finally:
        ctx.end_time = time.perf_counter()
        if enabled:
            # rendering must never mask the command's own outcome
            with suppress(Exception):
                if rich:
                    console.print(build_explain_panel(ctx))
                else:
                    console.print(render_explain_panel(ctx), markup=False, highlight=False)
