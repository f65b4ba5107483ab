"""Context conditions (design-time checks) over architectures, automata,
application configurations and bindings.

Condition codes:

CC1   type names unique across the workspace, disjoint from builtins, and
      every referenced type resolves
CC2   port and subcomponent instance names unique per component
CC3   connector endpoints exist and connect in a legal direction
CC4   connector source and target port types are nominally identical
CC5   one driver per subcomponent in-port and composed out-port
CC6   automaton references, directions and literal types
CC7   composed components carry no automaton, atomic ones no connectors
CC8   every abstract instance is bound
CC9   bound implementation exists and implements the instance's type
CC10  generators and bound libraries share one RTE; all roles selected
CC11  bindings name existing abstract instances only
CC12  names unique inside a class diagram
"""

from __future__ import annotations

from collections import Counter
from typing import Sequence

from macc.codegen import ROLES, GeneratorDescriptor
from macc.diagnostics import CheckReport, Diagnostic, Location, error, report, warning
from macc.model import (
    BUILTIN_TYPES,
    NUMERIC_TYPES,
    ORDERING_OPERATORS,
    Action,
    ApplicationConfiguration,
    ArchitectureModel,
    Classification,
    CodeLibraryManifest,
    ComponentType,
    Direction,
    InstanceNode,
    Port,
    PortRef,
    literal_conforms,
    literal_type_label,
)
from macc.parsing.printer import format_literal

ROOT_LOCATION = Location("<root>", 1, 1)


# -- architecture ----------------------------------------------------------


def check_architecture(model: ArchitectureModel, root_type: str) -> CheckReport:
    diags: list[Diagnostic] = []
    _check_type_names(model, diags)
    for cd in model.diagrams:
        _check_diagram_internals(cd, diags)
    for component in model.components:
        _check_component(component, model, diags)
        if component.behavior is not None and not component.subcomponents:
            diags.extend(check_automaton(component, model).diagnostics)
    _check_recursion(model, diags)
    if model.component(root_type) is None:
        diags.append(error("UnknownRootType", ROOT_LOCATION, f"unknown root component type '{root_type}'"))
    return report(diags)


def _check_type_names(model: ArchitectureModel, diags: list[Diagnostic]) -> None:
    # name -> owning class diagram (None for component types)
    seen: dict[str, object] = {}
    for component in model.components:
        if component.name in BUILTIN_TYPES:
            diags.append(error("CC1", component.loc, f"component type '{component.name}' collides with a builtin type"))
        elif component.name in seen:
            diags.append(error("CC1", component.loc, f"type name '{component.name}' is declared more than once"))
        seen.setdefault(component.name, None)
    for cd in model.diagrams:
        for decl in (*cd.enums, *cd.records):
            if decl.name in BUILTIN_TYPES:
                diags.append(error("CC1", decl.loc, f"data type '{decl.name}' collides with a builtin type"))
            elif decl.name in seen and seen[decl.name] is not cd:
                diags.append(error("CC1", decl.loc, f"type name '{decl.name}' is declared more than once"))
            seen.setdefault(decl.name, cd)
        for record in cd.records:
            for fld in record.fields:
                if model.resolve_type(fld.type) is None:
                    diags.append(error("CC1", fld.loc, f"unknown data type '{fld.type}' of field {record.name}.{fld.name}"))


def _check_diagram_internals(cd, diags: list[Diagnostic]) -> None:
    names: set[str] = set()
    for decl in (*cd.enums, *cd.records):
        if decl.name in names:
            diags.append(error("CC12", decl.loc, f"type '{decl.name}' is declared twice in class diagram {cd.name}"))
        names.add(decl.name)
    for enum in cd.enums:
        for literal, count in Counter(enum.literals).items():
            if count > 1:
                diags.append(error("CC12", enum.loc, f"literal '{literal}' is declared twice in enum {enum.name}"))
    for record in cd.records:
        fields: set[str] = set()
        for fld in record.fields:
            if fld.name in fields:
                diags.append(error("CC12", fld.loc, f"field '{fld.name}' is declared twice in class {record.name}"))
            fields.add(fld.name)


def _check_component(component: ComponentType, model: ArchitectureModel, diags: list[Diagnostic]) -> None:
    ports: set[str] = set()
    for port in component.ports:
        if port.name in ports:
            diags.append(error("CC2", port.loc, f"port '{port.name}' is declared twice in {component.name}"))
        ports.add(port.name)
        if model.resolve_type(port.type) is None:
            diags.append(error("CC1", port.loc, f"unknown data type '{port.type}' of port {component.name}.{port.name}"))
    instances: set[str] = set()
    for sub in component.subcomponents:
        if sub.name in instances:
            diags.append(error("CC2", sub.loc, f"instance '{sub.name}' is declared twice in {component.name}"))
        instances.add(sub.name)
        if model.component(sub.type_name) is None:
            diags.append(error("CC1", sub.loc, f"unknown component type '{sub.type_name}' of instance {sub.name}"))

    if component.subcomponents:
        if component.behavior is not None:
            diags.append(error("CC7", component.behavior.loc, f"composed component {component.name} must not have an automaton"))
        _check_connectors(component, model, diags)
    else:
        for conn in component.connectors:
            diags.append(error("CC7", conn.loc, f"atomic component {component.name} must not have connectors"))


def _resolve_endpoint(
    component: ComponentType, model: ArchitectureModel, ref: PortRef, role: str, diags: list[Diagnostic]
) -> Port | None:
    if ref.instance is None:
        port = component.port(ref.port)
        if port is None:
            diags.append(error("CC3", ref.loc, f"unknown port '{ref.port}' of {component.name}"))
            return None
        illegal = Direction.OUT if role == "source" else Direction.IN
    else:
        sub = component.subcomponent(ref.instance)
        if sub is None:
            diags.append(error("CC3", ref.loc, f"unknown subcomponent instance '{ref.instance}' in {component.name}"))
            return None
        sub_type = model.component(sub.type_name)
        if sub_type is None:
            return None
        port = sub_type.port(ref.port)
        if port is None:
            diags.append(error("CC3", ref.loc, f"unknown port '{ref.port}' of instance {ref.instance} ({sub_type.name})"))
            return None
        illegal = Direction.IN if role == "source" else Direction.OUT
    if port.direction is illegal:
        diags.append(
            error("CC3", ref.loc, f"{port.direction.value}-port {ref} cannot be a connector {role}")
        )
        return None
    return port


def _check_connectors(component: ComponentType, model: ArchitectureModel, diags: list[Diagnostic]) -> None:
    drivers: dict[tuple[str | None, str], list[PortRef]] = {}
    used_sources: set[tuple[str | None, str]] = set()
    for conn in component.connectors:
        src = _resolve_endpoint(component, model, conn.source, "source", diags)
        if src is not None:
            used_sources.add((conn.source.instance, conn.source.port))
        for target in conn.targets:
            dst = _resolve_endpoint(component, model, target, "target", diags)
            if dst is None:
                continue
            drivers.setdefault((target.instance, target.port), []).append(target)
            if src is not None and src.type != dst.type:
                diags.append(
                    error("CC4", target.loc, f"type mismatch: {conn.source} is {src.type} but {target} is {dst.type}")
                )

    def require_one_driver(key: tuple[str | None, str], label: str, decl_loc: Location) -> None:
        refs = drivers.get(key, [])
        if not refs:
            diags.append(error("CC5", decl_loc, f"in-port {label} has no driver" if key[0] else f"out-port {label} has no driver"))
        for extra in refs[1:]:
            diags.append(error("CC5", extra.loc, f"{label} has more than one driver"))

    for sub in component.subcomponents:
        sub_type = model.component(sub.type_name)
        if sub_type is None:
            continue
        for port in sub_type.in_ports():
            require_one_driver((sub.name, port.name), f"{sub.name}.{port.name}", sub.loc)
        for port in sub_type.out_ports():
            if (sub.name, port.name) not in used_sources:
                diags.append(warning("CC5", sub.loc, f"out-port {sub.name}.{port.name} is not connected"))
    for port in component.out_ports():
        require_one_driver((None, port.name), port.name, port.loc)


def _check_recursion(model: ArchitectureModel, diags: list[Diagnostic]) -> None:
    state: dict[str, int] = {}  # 1 = on stack, 2 = done

    def visit(component: ComponentType) -> None:
        state[component.name] = 1
        for sub in component.subcomponents:
            sub_type = model.component(sub.type_name)
            if sub_type is None:
                continue
            mark = state.get(sub_type.name)
            if mark == 1:
                diags.append(
                    error("RecursiveComposition", sub.loc, f"component type '{sub_type.name}' transitively contains itself")
                )
            elif mark is None:
                visit(sub_type)
        state[component.name] = 2

    for component in model.components:
        if component.name not in state:
            visit(component)


# -- automata --------------------------------------------------------------


def check_automaton(component: ComponentType, model: ArchitectureModel) -> CheckReport:
    automaton = component.behavior
    if automaton is None:
        return report([])
    diags: list[Diagnostic] = []
    states: set[str] = set()
    for name in automaton.states:
        if name in states:
            diags.append(error("CC6", automaton.loc, f"state '{name}' is declared twice"))
        states.add(name)
    if automaton.initial not in states:
        diags.append(error("CC6", automaton.initial_loc, f"initial state '{automaton.initial}' is not declared"))
    _check_actions(component, model, automaton.initial_actions, diags)
    for t in automaton.transitions:
        for end in (t.source, t.target):
            if end not in states:
                diags.append(error("CC6", t.loc, f"transition {t.source} -> {t.target} uses undeclared state '{end}'"))
        for atom in t.guard:
            port = component.port(atom.port)
            if port is None or port.direction is not Direction.IN:
                diags.append(error("CC6", atom.loc, f"guard refers to '{atom.port}', which is not an in-port"))
                continue
            type_ref = model.resolve_type(port.type)
            if type_ref is None:
                continue
            if atom.operator in ORDERING_OPERATORS and type_ref.name not in NUMERIC_TYPES:
                diags.append(error("CC6", atom.loc, f"operator '{atom.operator}' needs a numeric port, {atom.port} is {port.type}"))
            if not literal_conforms(atom.literal, type_ref, model):
                diags.append(error("CC6", atom.loc, _literal_mismatch(atom.literal, atom.port, port.type)))
        _check_actions(component, model, t.actions, diags)
    return report(diags)


def _check_actions(
    component: ComponentType, model: ArchitectureModel, actions: Sequence[Action], diags: list[Diagnostic]
) -> None:
    assigned: set[str] = set()
    for action in actions:
        port = component.port(action.port)
        if port is None or port.direction is not Direction.OUT:
            diags.append(error("CC6", action.loc, f"action assigns '{action.port}', which is not an out-port"))
            continue
        if action.port in assigned:
            diags.append(error("CC6", action.loc, f"out-port {action.port} is assigned twice in one action list"))
        assigned.add(action.port)
        type_ref = model.resolve_type(port.type)
        if type_ref is not None and not literal_conforms(action.literal, type_ref, model):
            diags.append(error("CC6", action.loc, _literal_mismatch(action.literal, action.port, port.type)))


def _literal_mismatch(value, port: str, port_type: str) -> str:
    return f"literal {format_literal(value)} ({literal_type_label(value)}) does not fit port {port} of type {port_type}"


# -- bindings --------------------------------------------------------------


def check_binding(
    tree: InstanceNode,
    config: ApplicationConfiguration,
    libraries: Sequence[CodeLibraryManifest],
    registry: Sequence[GeneratorDescriptor] | None,
) -> CheckReport:
    """Binding totality, conformance and RTE compatibility.

    ``registry`` resolves the configuration's generator names; pass None to
    skip generator checks (the simulator ignores the generators clause).
    """
    diags: list[Diagnostic] = []
    by_name = {lib.name: lib for lib in reversed(libraries)}
    imported = []
    for name in config.imports:
        if name in by_name:
            imported.append(by_name[name])
        else:
            diags.append(error("UnresolvedImport", config.loc, f"no code library named '{name}'"))

    for node in tree.walk():
        if node.classification is Classification.COMPOSED and node is not tree and node.name in config.imports:
            diags.append(
                error("NameCollision", config.loc, f"instance {node.qualified_name} collides with imported library '{node.name}'")
            )

    rte_sources: dict[str, list[str]] = {}
    for b in config.bindings:
        node = tree.find(b.instance)
        if node is None:
            diags.append(error("CC11", b.loc, f"no instance named {b.instance}"))
            continue
        if node.classification is not Classification.ABSTRACT:
            diags.append(error("CC11", b.loc, f"instance {b.instance} is {node.classification.value} and cannot be bound"))
            continue
        found = [(lib, lib.implementation(b.implementation)) for lib in imported if lib.implementation(b.implementation)]
        if not found:
            diags.append(error("CC9", b.loc, f"no imported library provides implementation '{b.implementation}'"))
            continue
        if len(found) > 1:
            libs = ", ".join(lib.name for lib, _ in found)
            diags.append(error("CC9", b.loc, f"implementation '{b.implementation}' is ambiguous between {libs}"))
            continue
        lib, impl = found[0]
        if impl.implements != node.type_name:
            diags.append(
                error("CC9", b.loc, f"{b.implementation} implements {impl.implements}, not {node.type_name} of {b.instance}")
            )
            continue
        sources = rte_sources.setdefault(lib.rte, [])
        if f"library {lib.name}" not in sources:
            sources.append(f"library {lib.name}")

    for node in tree.walk():
        if node.classification is Classification.ABSTRACT and config.binding_for(node.qualified_name) is None:
            diags.append(error("CC8", config.loc, f"abstract instance {node.qualified_name} ({node.type_name}) is not bound"))

    if registry is not None:
        known = {g.name: g for g in registry}
        roles: set[str] = set()
        for name in config.generators:
            gen = known.get(name)
            if gen is None:
                diags.append(error("CC10", config.loc, f"unknown generator '{name}'"))
                continue
            roles.add(gen.role)
            rte_sources.setdefault(gen.rte, []).append(f"generator {gen.name}")
        missing = [r for r in ROLES if r not in roles]
        if missing:
            diags.append(error("CC10", config.loc, f"generator selection lacks role(s): {', '.join(missing)}"))
    if len(rte_sources) > 1:
        detail = "; ".join(f"{rte}: {', '.join(srcs)}" for rte, srcs in sorted(rte_sources.items()))
        diags.append(
            error("CC10", config.loc, f"generators and bound libraries have to comply to the same runtime environment ({detail})")
        )
    return report(diags)
