"""Generator orchestration: role-specific generators that emit deterministic
pseudo-source text for a target runtime environment (RTE).

Every generated file starts with ``// rte: <rte>`` and ``// generator: <name>``.
Structure files hold an INTERFACE section and, for composed types, one
FACTORY section per instance of the type. Behavior files hold a BEHAVIOR
section, datatype files a BUILTINS table plus enum and record declarations.

Layout below the output directory::

    <rte>/<TypeName>.gen            structure
    <rte>/behavior/<TypeName>.gen   behavior
    <rte>/types/<CDName>.gen        datatypes
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from macc.diagnostics import MaccError
from macc.model import (
    Action,
    ApplicationConfiguration,
    ArchitectureModel,
    ClassDiagram,
    Classification,
    ComponentType,
    GuardAtom,
    InstanceNode,
    Literal,
    qualify_literal,
)
from macc.parsing.printer import format_literal

STRUCTURE = "structure"
BEHAVIOR = "behavior"
DATATYPE = "datatype"
ROLES = (STRUCTURE, BEHAVIOR, DATATYPE)
# Execution order of the roles; outputs are independent files.
EXECUTION_ORDER = (DATATYPE, STRUCTURE, BEHAVIOR)


@dataclass(frozen=True)
class GeneratorDescriptor:
    name: str
    rte: str
    role: str


_REGISTRY = (
    GeneratorDescriptor("structure-a", "rte-a", STRUCTURE),
    GeneratorDescriptor("behavior-a", "rte-a", BEHAVIOR),
    GeneratorDescriptor("datatypes-a", "rte-a", DATATYPE),
    GeneratorDescriptor("structure-b", "rte-b", STRUCTURE),
    GeneratorDescriptor("behavior-b", "rte-b", BEHAVIOR),
    GeneratorDescriptor("datatypes-b", "rte-b", DATATYPE),
)

# Platform representation of the builtin types, fixed per RTE.
BUILTIN_MAPPINGS = {
    "rte-a": {"Integer": "int", "Boolean": "boolean", "String": "String", "Double": "double"},
    "rte-b": {"Integer": "int", "Boolean": "bool", "String": "str", "Double": "float"},
}


def registry() -> list[GeneratorDescriptor]:
    return list(_REGISTRY)


def lookup(name: str) -> GeneratorDescriptor | None:
    return next((g for g in _REGISTRY if g.name == name), None)


class CodegenError(MaccError):
    code = "CodegenError"


class UnknownGenerator(CodegenError):
    code = "UnknownGenerator"


class RoleMissing(CodegenError):
    code = "RoleMissing"


class RteConflict(CodegenError):
    code = "RteConflict"


class UnboundInstance(CodegenError):
    code = "UnboundInstance"


class NotFullyModeled(CodegenError):
    code = "NotFullyModeled"


class WriteError(CodegenError):
    code = "WriteError"


@dataclass(frozen=True)
class GeneratedFileSet:
    files: tuple[tuple[str, str], ...]

    def paths(self) -> list[str]:
        return [path for path, _ in self.files]

    def text(self, path: str) -> str:
        return dict(self.files)[path]


def _header(rte: str, generator: str) -> list[str]:
    return [f"// rte: {rte}", f"// generator: {generator}"]


def _text(lines: list[str]) -> str:
    return "\n".join(lines) + "\n"


def emit_structure(
    component: ComponentType, bound_tree: InstanceNode, rte: str, generator: str = ""
) -> str:
    generator = generator or _default_name(STRUCTURE, rte)
    lines = _header(rte, generator)
    lines.append(f"INTERFACE {component.name}")
    for port in component.ports:
        lines.append(f"  {port.direction.value} {port.type} {port.name}")
    if component.subcomponents:
        owners = [n for n in bound_tree.walk() if n.type_name == component.name]
        for owner in owners:
            lines.append(f"FACTORY {owner.qualified_name}")
            for child in owner.children:
                lines.append(f"  {child.name} = {_instantiation(child)}")
    return _text(lines)


def _instantiation(child: InstanceNode) -> str:
    if child.classification is Classification.ABSTRACT:
        if child.binding is None:
            raise UnboundInstance(f"abstract instance {child.qualified_name} has no binding")
        return f"new {child.binding.implementation}"
    if child.classification is Classification.FULLY_MODELED:
        return f"new {child.type_name}Impl"
    return f"new {child.type_name}"


def _literal(value: Literal, component: ComponentType, model: ArchitectureModel | None, port: str) -> str:
    if model is not None:
        type_ref = model.port_type(component, port)
        if type_ref is not None:
            value = qualify_literal(value, type_ref)
    return format_literal(value)


def emit_behavior(
    component: ComponentType,
    rte: str,
    generator: str = "",
    model: ArchitectureModel | None = None,
) -> str:
    """Transition-table rendering of a fully modeled component's automaton.

    With ``model`` given, bare enum literals are printed qualified.
    """
    automaton = component.behavior
    if automaton is None or component.subcomponents:
        raise NotFullyModeled(f"component {component.name} has no embedded automaton")
    generator = generator or _default_name(BEHAVIOR, rte)

    def actions(items: Sequence[Action]) -> str:
        return "{" + ", ".join(f"{a.port} = {_literal(a.literal, component, model, a.port)}" for a in items) + "}"

    def guard(atoms: Sequence[GuardAtom]) -> str:
        if not atoms:
            return "true"
        return " && ".join(f"{g.port} {g.operator} {_literal(g.literal, component, model, g.port)}" for g in atoms)

    lines = _header(rte, generator)
    lines.append(f"BEHAVIOR {component.name}")
    lines.extend(f"  state {s}" for s in automaton.states)
    lines.append(f"  initial {automaton.initial} / {actions(automaton.initial_actions)}")
    for t in automaton.transitions:
        lines.append(f"  {t.source} -> {t.target} [{guard(t.guard)}] / {actions(t.actions)}")
    return _text(lines)


def emit_datatypes(cds: Sequence[ClassDiagram], rte: str, generator: str = "") -> dict[str, str]:
    """One text per class diagram, keyed by diagram name."""
    generator = generator or _default_name(DATATYPE, rte)
    mapping = BUILTIN_MAPPINGS.get(rte)
    if mapping is None:
        raise CodegenError(f"no builtin type mapping for runtime environment '{rte}'")
    out: dict[str, str] = {}
    for cd in cds:
        lines = _header(rte, generator)
        lines.append(f"DATATYPES {cd.name}")
        lines.append("BUILTINS")
        lines.extend(f"  {logical} -> {platform}" for logical, platform in mapping.items())
        for enum in cd.enums:
            lines.append(f"ENUM {enum.name}")
            lines.extend(f"  {literal}" for literal in enum.literals)
        for record in cd.records:
            lines.append(f"RECORD {record.name}")
            lines.extend(f"  {f.type} {f.name}" for f in record.fields)
        out[cd.name] = _text(lines)
    return out


def _default_name(role: str, rte: str) -> str:
    found = [g.name for g in _REGISTRY if g.role == role and g.rte == rte]
    return found[0] if found else f"{role}-{rte}"


def select_generators(names: Sequence[str]) -> dict[str, GeneratorDescriptor]:
    """Resolve a generator selection to one descriptor per role."""
    selected: dict[str, GeneratorDescriptor] = {}
    for name in names:
        gen = lookup(name)
        if gen is None:
            raise UnknownGenerator(f"unknown generator '{name}'")
        if gen.role in selected and selected[gen.role] != gen:
            raise CodegenError(f"generators {selected[gen.role].name} and {gen.name} both provide role {gen.role}")
        selected[gen.role] = gen
    missing = [r for r in ROLES if r not in selected]
    if missing:
        raise RoleMissing(f"generator selection lacks role(s): {', '.join(missing)}")
    rtes = sorted({g.rte for g in selected.values()})
    if len(rtes) > 1:
        raise RteConflict(f"selected generators target different runtime environments: {', '.join(rtes)}")
    return selected


def reachable_types(bound_tree: InstanceNode, model: ArchitectureModel) -> list[ComponentType]:
    seen: list[str] = []
    for node in bound_tree.walk():
        if node.type_name not in seen:
            seen.append(node.type_name)
    types = []
    for name in seen:
        component = model.component(name)
        if component is None:
            raise CodegenError(f"unknown component type '{name}'")
        types.append(component)
    return types


def generate(
    bound_tree: InstanceNode, model: ArchitectureModel, config: ApplicationConfiguration
) -> GeneratedFileSet:
    """Run the selected generators in memory."""
    selected = select_generators(config.generators)
    files: dict[str, str] = {}
    for role in EXECUTION_ORDER:
        gen = selected[role]
        base = gen.rte
        if role == DATATYPE:
            for name, text in emit_datatypes(model.diagrams, gen.rte, gen.name).items():
                files[f"{base}/types/{name}.gen"] = text
        elif role == STRUCTURE:
            for component in reachable_types(bound_tree, model):
                files[f"{base}/{component.name}.gen"] = emit_structure(component, bound_tree, gen.rte, gen.name)
        else:
            for component in reachable_types(bound_tree, model):
                if component.behavior is not None and not component.subcomponents:
                    files[f"{base}/behavior/{component.name}.gen"] = emit_behavior(
                        component, gen.rte, gen.name, model
                    )
    return GeneratedFileSet(tuple(sorted(files.items())))


def orchestrate(
    bound_tree: InstanceNode,
    model: ArchitectureModel,
    config: ApplicationConfiguration,
    out_dir: str | Path,
) -> GeneratedFileSet:
    """Generate and write every file below ``out_dir`` (LF newlines, UTF-8)."""
    file_set = generate(bound_tree, model, config)
    root = Path(out_dir)
    for rel, text in file_set.files:
        target = root / rel
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            with open(target, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise WriteError(f"cannot write {target}: {exc}") from exc
    return file_set
