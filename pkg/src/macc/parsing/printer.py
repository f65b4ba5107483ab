"""Pretty-printers producing re-parseable source text for every language."""

from __future__ import annotations

import json
from decimal import Decimal
from functools import singledispatch

from macc.model import (
    Action,
    ApplicationConfiguration,
    ClassDiagram,
    CodeLibraryManifest,
    ComponentType,
    Literal,
)


def format_literal(value: Literal) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        # the lexer has no exponent notation
        text = format(Decimal(repr(value)), "f")
        return text if "." in text else text + ".0"
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    return str(value)


def _actions(actions: tuple[Action, ...]) -> str:
    return "{" + ", ".join(f"{a.port} = {format_literal(a.literal)}" for a in actions) + "}"


@singledispatch
def pretty_print(node) -> str:
    raise TypeError(f"cannot print {type(node).__name__}")


@pretty_print.register
def _(component: ComponentType) -> str:
    lines = [f"component {component.name} {{"]
    for lib in component.imports:
        lines.append(f"  import {lib}.*;")
    for port in component.ports:
        lines.append(f"  port {port.direction.value} {port.type} {port.name};")
    for sub in component.subcomponents:
        lines.append(f"  component {sub.type_name} {sub.name};")
    for conn in component.connectors:
        targets = ", ".join(str(t) for t in conn.targets)
        lines.append(f"  connect {conn.source} -> {targets};")
    automaton = component.behavior
    if automaton is not None:
        lines.append("  automaton {")
        lines.append(f"    state {', '.join(automaton.states)};")
        initial = f"    initial {automaton.initial}"
        if automaton.initial_actions:
            initial += f" / {_actions(automaton.initial_actions)}"
        lines.append(initial + ";")
        for t in automaton.transitions:
            line = f"    {t.source} -> {t.target}"
            if t.guard:
                atoms = " && ".join(f"{g.port} {g.operator} {format_literal(g.literal)}" for g in t.guard)
                line += f" [{atoms}]"
            if t.actions:
                line += f" / {_actions(t.actions)}"
            lines.append(line + ";")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


@pretty_print.register
def _(cd: ClassDiagram) -> str:
    lines = [f"classdiagram {cd.name} {{"]
    for enum in cd.enums:
        lines.append(f"  enum {enum.name} {{ {', '.join(enum.literals)}; }}")
    for record in cd.records:
        lines.append(f"  class {record.name} {{")
        lines.extend(f"    {f.type} {f.name};" for f in record.fields)
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


@pretty_print.register
def _(app: ApplicationConfiguration) -> str:
    lines = [f"import {lib}.*;" for lib in app.imports]
    if lines:
        lines.append("")
    lines.append(f"application {app.name} {{")
    lines.append(f"  generators {', '.join(app.generators)};")
    lines.append("  bindings")
    maps = [f"    map {b.instance} to {b.implementation}" for b in app.bindings]
    lines.append(",\n".join(maps) + ";")
    lines.append("}")
    return "\n".join(lines) + "\n"


@pretty_print.register
def _(lib: CodeLibraryManifest) -> str:
    lines = [f"library {lib.name} {{", f"  rte {lib.rte};"]
    for impl in lib.implementations:
        line = f"  implementation {impl.name} implements {impl.implements}"
        if impl.kind is not None:
            line += f" kind {impl.kind}"
        lines.append(line + ";")
    lines.append("}")
    return "\n".join(lines) + "\n"

