"""Abstract syntax of the architecture, class diagram, configuration and
library languages, plus component classification, instantiation and
flattening.

All model objects are frozen dataclasses so that trees can be compared
structurally; source locations are excluded from equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator, Union

from macc.diagnostics import UNKNOWN, Location, MaccError

BUILTIN_TYPES = ("Integer", "Boolean", "String", "Double")
NUMERIC_TYPES = ("Integer", "Double")
GUARD_OPERATORS = ("==", "!=", "<", ">", "<=", ">=")
ORDERING_OPERATORS = ("<", ">", "<=", ">=")


def _loc() -> Location:
    return field(default=UNKNOWN, compare=False, repr=False)


# -- data types ------------------------------------------------------------


class TypeKind(str, Enum):
    BUILTIN = "builtin"
    ENUM = "enum"
    RECORD = "record"


@dataclass(frozen=True)
class DataTypeRef:
    name: str
    kind: TypeKind


@dataclass(frozen=True)
class EnumDecl:
    name: str
    literals: tuple[str, ...]
    loc: Location = _loc()


@dataclass(frozen=True)
class FieldDecl:
    name: str
    type: str
    loc: Location = _loc()


@dataclass(frozen=True)
class RecordDecl:
    name: str
    fields: tuple[FieldDecl, ...]
    loc: Location = _loc()


@dataclass(frozen=True)
class ClassDiagram:
    name: str
    enums: tuple[EnumDecl, ...] = ()
    records: tuple[RecordDecl, ...] = ()
    loc: Location = _loc()

    def type_names(self) -> list[str]:
        return [e.name for e in self.enums] + [r.name for r in self.records]


# -- literals --------------------------------------------------------------


@dataclass(frozen=True)
class EnumLiteral:
    """An enum constant; ``enum`` is None for a bare literal."""

    enum: str | None
    literal: str

    def __str__(self) -> str:
        return f"{self.enum}.{self.literal}" if self.enum else self.literal


Literal = Union[int, bool, str, float, EnumLiteral]


def literal_conforms(value: Literal, type_ref: DataTypeRef, model: ArchitectureModel) -> bool:
    """True if ``value`` is a legal message of the given port type."""
    name = type_ref.name
    if type_ref.kind is TypeKind.BUILTIN:
        if name == "Boolean":
            return isinstance(value, bool)
        if name == "Integer":
            return isinstance(value, int) and not isinstance(value, bool)
        if name == "Double":
            return isinstance(value, float)
        return isinstance(value, str)
    if type_ref.kind is TypeKind.ENUM:
        if not isinstance(value, EnumLiteral) or value.enum not in (None, name):
            return False
        decl = model.enum(name)
        return decl is not None and value.literal in decl.literals
    # record values are not constructible
    return False


def qualify_literal(value: Literal, type_ref: DataTypeRef) -> Literal:
    """Attach the enum name to a bare enum literal."""
    if isinstance(value, EnumLiteral) and value.enum is None and type_ref.kind is TypeKind.ENUM:
        return EnumLiteral(type_ref.name, value.literal)
    return value


def literal_type_label(value: Literal) -> str:
    if isinstance(value, bool):
        return "Boolean"
    if isinstance(value, int):
        return "Integer"
    if isinstance(value, float):
        return "Double"
    if isinstance(value, str):
        return "String"
    return value.enum or f"enum literal {value.literal}"


# -- components ------------------------------------------------------------


class Direction(str, Enum):
    IN = "in"
    OUT = "out"


@dataclass(frozen=True)
class Port:
    name: str
    direction: Direction
    type: str
    loc: Location = _loc()


@dataclass(frozen=True)
class Subcomponent:
    name: str
    type_name: str
    loc: Location = _loc()


@dataclass(frozen=True)
class PortRef:
    """``port`` of the enclosing component, or ``instance.port``."""

    instance: str | None
    port: str
    loc: Location = _loc()

    def __str__(self) -> str:
        return f"{self.instance}.{self.port}" if self.instance else self.port


@dataclass(frozen=True)
class Connector:
    source: PortRef
    targets: tuple[PortRef, ...]
    loc: Location = _loc()


@dataclass(frozen=True)
class GuardAtom:
    port: str
    operator: str
    literal: Literal
    loc: Location = _loc()


@dataclass(frozen=True)
class Action:
    port: str
    literal: Literal
    loc: Location = _loc()


@dataclass(frozen=True)
class Transition:
    source: str
    target: str
    guard: tuple[GuardAtom, ...] = ()
    actions: tuple[Action, ...] = ()
    loc: Location = _loc()


@dataclass(frozen=True)
class Automaton:
    states: tuple[str, ...]
    initial: str
    initial_actions: tuple[Action, ...] = ()
    transitions: tuple[Transition, ...] = ()
    loc: Location = _loc()
    initial_loc: Location = _loc()


@dataclass(frozen=True)
class ComponentType:
    name: str
    ports: tuple[Port, ...] = ()
    subcomponents: tuple[Subcomponent, ...] = ()
    connectors: tuple[Connector, ...] = ()
    behavior: Automaton | None = None
    imports: tuple[str, ...] = ()
    loc: Location = _loc()

    def port(self, name: str) -> Port | None:
        return next((p for p in self.ports if p.name == name), None)

    def subcomponent(self, name: str) -> Subcomponent | None:
        return next((s for s in self.subcomponents if s.name == name), None)

    def in_ports(self) -> list[Port]:
        return [p for p in self.ports if p.direction is Direction.IN]

    def out_ports(self) -> list[Port]:
        return [p for p in self.ports if p.direction is Direction.OUT]


class Classification(str, Enum):
    COMPOSED = "composed"
    FULLY_MODELED = "fully-modeled"
    ABSTRACT = "abstract"


def classify(component: ComponentType) -> Classification:
    if component.subcomponents:
        return Classification.COMPOSED
    if component.behavior is not None:
        return Classification.FULLY_MODELED
    return Classification.ABSTRACT


@dataclass(frozen=True)
class ArchitectureModel:
    """All component types and class diagrams of one workspace, in load order."""

    components: tuple[ComponentType, ...] = ()
    diagrams: tuple[ClassDiagram, ...] = ()

    def component(self, name: str) -> ComponentType | None:
        return next((c for c in self.components if c.name == name), None)

    def enum(self, name: str) -> EnumDecl | None:
        for cd in self.diagrams:
            for decl in cd.enums:
                if decl.name == name:
                    return decl
        return None

    def record(self, name: str) -> RecordDecl | None:
        for cd in self.diagrams:
            for decl in cd.records:
                if decl.name == name:
                    return decl
        return None

    def resolve_type(self, name: str) -> DataTypeRef | None:
        if name in BUILTIN_TYPES:
            return DataTypeRef(name, TypeKind.BUILTIN)
        if self.enum(name) is not None:
            return DataTypeRef(name, TypeKind.ENUM)
        if self.record(name) is not None:
            return DataTypeRef(name, TypeKind.RECORD)
        return None

    def port_type(self, component: ComponentType, port: str) -> DataTypeRef | None:
        decl = component.port(port)
        return self.resolve_type(decl.type) if decl else None


# -- libraries and configurations -----------------------------------------


@dataclass(frozen=True)
class StubKind:
    name: str
    parameter: int | None = None

    def __str__(self) -> str:
        return self.name if self.parameter is None else f"{self.name}({self.parameter})"


@dataclass(frozen=True)
class Implementation:
    name: str
    implements: str
    kind: StubKind | None = None
    loc: Location = _loc()


@dataclass(frozen=True)
class CodeLibraryManifest:
    """The library properties model of one code library."""

    name: str
    rte: str
    implementations: tuple[Implementation, ...] = ()
    loc: Location = _loc()

    def implementation(self, name: str) -> Implementation | None:
        return next((i for i in self.implementations if i.name == name), None)


@dataclass(frozen=True)
class Binding:
    instance: str
    implementation: str
    loc: Location = _loc()


@dataclass(frozen=True)
class ApplicationConfiguration:
    name: str
    imports: tuple[str, ...]
    generators: tuple[str, ...]
    bindings: tuple[Binding, ...]
    loc: Location = _loc()

    def binding_for(self, qualified_name: str) -> Binding | None:
        return next((b for b in self.bindings if b.instance == qualified_name), None)


@dataclass(frozen=True)
class ImplementationRef:
    library: str
    implementation: str
    rte: str
    kind: StubKind | None = None

    def __str__(self) -> str:
        return f"{self.library}.{self.implementation}"


# -- instances -------------------------------------------------------------


class ModelError(MaccError):
    code = "ModelError"


class UnknownRootType(ModelError):
    code = "UnknownRootType"


class UnknownComponentType(ModelError):
    code = "UnknownComponentType"


class RecursiveComposition(ModelError):
    code = "RecursiveComposition"


class DanglingBoundary(ModelError):
    code = "DanglingBoundary"


@dataclass(frozen=True)
class InstanceNode:
    qualified_name: str
    type_name: str
    classification: Classification
    children: tuple[InstanceNode, ...] = ()
    binding: ImplementationRef | None = None

    @property
    def name(self) -> str:
        return self.qualified_name.rsplit(".", 1)[-1]

    def walk(self) -> Iterator[InstanceNode]:
        """Depth-first, declaration-order traversal including self."""
        yield self
        for child in self.children:
            yield from child.walk()

    def find(self, qualified_name: str) -> InstanceNode | None:
        return next((n for n in self.walk() if n.qualified_name == qualified_name), None)

    def atomic_nodes(self) -> list[InstanceNode]:
        return [n for n in self.walk() if n.classification is not Classification.COMPOSED]

    def with_binding(self, binding: ImplementationRef | None) -> InstanceNode:
        return replace(self, binding=binding)


def instantiate(model: ArchitectureModel, root_type: str) -> InstanceNode:
    root = model.component(root_type)
    if root is None:
        raise UnknownRootType(f"unknown root component type '{root_type}'")

    def expand(component: ComponentType, qualified_name: str, stack: tuple[str, ...]) -> InstanceNode:
        children = []
        for sub in component.subcomponents:
            if sub.type_name in stack or sub.type_name == component.name:
                raise RecursiveComposition(
                    f"component type '{sub.type_name}' transitively contains itself "
                    f"(via {qualified_name}.{sub.name})",
                    sub.loc,
                )
            sub_type = model.component(sub.type_name)
            if sub_type is None:
                raise UnknownComponentType(
                    f"unknown component type '{sub.type_name}' for instance {qualified_name}.{sub.name}",
                    sub.loc,
                )
            children.append(expand(sub_type, f"{qualified_name}.{sub.name}", stack + (component.name,)))
        return InstanceNode(qualified_name, component.name, classify(component), tuple(children))

    return expand(root, root.name, ())


# -- flattening ------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Endpoint:
    instance: str
    port: str

    def __str__(self) -> str:
        return f"{self.instance}.{self.port}"


@dataclass(frozen=True, order=True)
class Wire:
    source: Endpoint
    target: Endpoint

    def __str__(self) -> str:
        return f"{self.source} -> {self.target}"


@dataclass(frozen=True)
class FlatArchitecture:
    instances: tuple[InstanceNode, ...]
    wires: tuple[Wire, ...]

    def instance(self, qualified_name: str) -> InstanceNode | None:
        return next((i for i in self.instances if i.qualified_name == qualified_name), None)

    def driver_of(self, target: Endpoint) -> Endpoint | None:
        return next((w.source for w in self.wires if w.target == target), None)


def flatten(tree: InstanceNode, model: ArchitectureModel) -> FlatArchitecture:
    """Collapse composed boundaries into direct atomic-to-atomic wires.

    Boundary ports of composed instances are zero-delay pass-throughs. The
    root's own ports face the environment and may legitimately dead-end.
    """
    kinds: dict[str, Classification] = {n.qualified_name: n.classification for n in tree.walk()}
    edges: dict[Endpoint, list[Endpoint]] = {}
    incoming: set[Endpoint] = set()
    for node in tree.walk():
        if node.classification is not Classification.COMPOSED:
            continue
        component = model.component(node.type_name)
        if component is None:
            raise UnknownComponentType(f"unknown component type '{node.type_name}'")

        def endpoint(ref: PortRef) -> Endpoint:
            owner = node.qualified_name if ref.instance is None else f"{node.qualified_name}.{ref.instance}"
            return Endpoint(owner, ref.port)

        for connector in component.connectors:
            src = endpoint(connector.source)
            for target in connector.targets:
                dst = endpoint(target)
                edges.setdefault(src, []).append(dst)
                incoming.add(dst)

    def is_boundary(ep: Endpoint) -> bool:
        return kinds.get(ep.instance) is Classification.COMPOSED

    wires: set[Wire] = set()
    for src in sorted(edges):
        if is_boundary(src):
            continue
        seen: set[Endpoint] = set()
        pending = list(edges[src])
        while pending:
            ep = pending.pop()
            if ep in seen:
                continue
            seen.add(ep)
            if not is_boundary(ep):
                wires.add(Wire(src, ep))
            elif ep in edges:
                pending.extend(edges[ep])
            elif ep.instance != tree.qualified_name:
                raise DanglingBoundary(f"boundary port {ep} reached from {src} leads to no atomic port")

    for ep in sorted(edges):
        if is_boundary(ep) and ep.instance != tree.qualified_name and ep not in incoming:
            raise DanglingBoundary(f"boundary port {ep} forwards messages but has no source")

    return FlatArchitecture(tuple(tree.atomic_nodes()), tuple(sorted(wires)))
