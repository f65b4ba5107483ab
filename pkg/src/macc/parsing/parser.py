"""Recursive-descent parsers for the architecture (.arc), class diagram (.cd),
application configuration (.app) and library properties (.lib) languages."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from macc.model import (
    GUARD_OPERATORS,
    Action,
    ApplicationConfiguration,
    Automaton,
    Binding,
    ClassDiagram,
    CodeLibraryManifest,
    ComponentType,
    Connector,
    Direction,
    EnumDecl,
    EnumLiteral,
    FieldDecl,
    GuardAtom,
    Implementation,
    Literal,
    Port,
    PortRef,
    RecordDecl,
    StubKind,
    Subcomponent,
    Transition,
)
from macc.parsing.lexer import ParseError, Token, tokenize


class NameMismatch(ParseError):
    code = "NameMismatch"


class UnsupportedFeature(ParseError):
    code = "UnsupportedFeature"


class DuplicateLiteral(ParseError):
    code = "DuplicateLiteral"


class DuplicateBinding(ParseError):
    code = "DuplicateBinding"


class DuplicateImplementation(ParseError):
    code = "DuplicateImplementation"


class UnitKind(str, Enum):
    ARCHITECTURE = "architecture"
    CLASSDIAGRAM = "classdiagram"
    APPCONFIG = "appconfig"
    LIBPROPS = "libprops"


EXTENSIONS = {
    ".arc": UnitKind.ARCHITECTURE,
    ".cd": UnitKind.CLASSDIAGRAM,
    ".app": UnitKind.APPCONFIG,
    ".lib": UnitKind.LIBPROPS,
}


@dataclass(frozen=True)
class SourceUnit:
    path: str
    kind: UnitKind
    text: str

    @classmethod
    def from_text(cls, text: str, path: str) -> SourceUnit:
        suffix = Path(path).suffix
        if suffix not in EXTENSIONS:
            raise ValueError(f"unrecognized model file extension: {path}")
        return cls(path, EXTENSIONS[suffix], text)

    @classmethod
    def read(cls, path: str | Path) -> SourceUnit:
        path = Path(path)
        return cls.from_text(path.read_text(encoding="utf-8"), str(path))


class _Parser:
    def __init__(self, text: str, path: str):
        self.tokens = tokenize(text, path)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("keyword", "sym") and self.tok.text == text

    def fail(self, expected: str) -> ParseError:
        return ParseError(f"expected {expected}, found {self.tok.describe()}", self.tok.loc)

    def advance(self) -> Token:
        tok = self.tok
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def accept(self, text: str) -> Token | None:
        return self.advance() if self.at(text) else None

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.fail(f"'{text}'")
        return self.advance()

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "id":
            raise self.fail(what)
        return self.advance()

    def end(self) -> None:
        if self.tok.kind != "eof":
            raise self.fail("end of input")

    def wildcard_import(self) -> Token:
        self.expect("import")
        name = self.ident("library name")
        self.expect(".")
        self.expect("*")
        self.expect(";")
        return name

    def reject_parameters(self, owner: str) -> None:
        if self.at("(") or self.at("<"):
            what = "configuration parameters" if self.at("(") else "generic type parameters"
            raise UnsupportedFeature(f"{what} are not supported ({owner})", self.tok.loc)

    def literal(self) -> Literal:
        tok = self.tok
        if tok.kind == "int":
            self.advance()
            return int(tok.text)
        if tok.kind == "float":
            self.advance()
            return float(tok.text)
        if tok.kind == "string":
            self.advance()
            return tok.text
        if self.accept("true"):
            return True
        if self.accept("false"):
            return False
        if tok.kind == "id":
            self.advance()
            if self.accept("."):
                return EnumLiteral(tok.text, self.ident("enum literal").text)
            return EnumLiteral(None, tok.text)
        raise self.fail("literal")


# -- architecture ----------------------------------------------------------


class _ArchitectureParser(_Parser):
    def component(self) -> ComponentType:
        imports = []
        while self.at("import"):
            imports.append(self.wildcard_import().text)
        self.expect("component")
        name = self.ident("component type name")
        self.reject_parameters(name.text)
        self.expect("{")
        ports: list[Port] = []
        subs: list[Subcomponent] = []
        connectors: list[Connector] = []
        behavior: Automaton | None = None
        while not self.at("}"):
            if self.at("port"):
                ports.extend(self.port_decl())
            elif self.at("component"):
                subs.extend(self.sub_decl())
            elif self.at("connect"):
                connectors.append(self.connector())
            elif self.at("automaton"):
                if behavior is not None:
                    raise ParseError("a component has at most one automaton", self.tok.loc)
                behavior = self.automaton()
            elif self.at("import"):
                imports.append(self.wildcard_import().text)
            else:
                raise self.fail("'port', 'component', 'connect', 'automaton', 'import' or '}'")
        self.expect("}")
        self.end()
        return ComponentType(
            name.text, tuple(ports), tuple(subs), tuple(connectors), behavior, tuple(imports), name.loc
        )

    def port_decl(self) -> list[Port]:
        self.expect("port")
        ports = [self.port_item()]
        while self.accept(","):
            ports.append(self.port_item())
        self.expect(";")
        return ports

    def port_item(self) -> Port:
        if self.accept("in"):
            direction = Direction.IN
        elif self.accept("out"):
            direction = Direction.OUT
        else:
            raise self.fail("'in' or 'out'")
        type_name = self.ident("port type")
        self.reject_parameters(f"port type {type_name.text}")
        name = self.ident("port name")
        return Port(name.text, direction, type_name.text, name.loc)

    def sub_decl(self) -> list[Subcomponent]:
        self.expect("component")
        type_name = self.ident("component type name")
        self.reject_parameters(f"subcomponent type {type_name.text}")
        subs = [self.ident("instance name")]
        while self.accept(","):
            subs.append(self.ident("instance name"))
        self.expect(";")
        return [Subcomponent(tok.text, type_name.text, tok.loc) for tok in subs]

    def port_ref(self) -> PortRef:
        first = self.ident("port reference")
        if self.accept("."):
            return PortRef(first.text, self.ident("port name").text, first.loc)
        return PortRef(None, first.text, first.loc)

    def connector(self) -> Connector:
        start = self.expect("connect")
        source = self.port_ref()
        self.expect("->")
        targets = [self.port_ref()]
        while self.accept(","):
            targets.append(self.port_ref())
        self.expect(";")
        return Connector(source, tuple(targets), start.loc)

    def automaton(self) -> Automaton:
        start = self.expect("automaton")
        self.expect("{")
        self.expect("state")
        states = [self.ident("state name").text]
        while self.accept(","):
            states.append(self.ident("state name").text)
        self.expect(";")
        self.expect("initial")
        initial = self.ident("initial state")
        initial_actions = self.actions() if self.accept("/") else ()
        self.expect(";")
        transitions = []
        while not self.at("}"):
            transitions.append(self.transition())
        self.expect("}")
        return Automaton(
            tuple(states), initial.text, initial_actions, tuple(transitions), start.loc, initial.loc
        )

    def transition(self) -> Transition:
        source = self.ident("transition source state or '}'")
        self.expect("->")
        target = self.ident("transition target state")
        guard: tuple[GuardAtom, ...] = ()
        if self.accept("["):
            atoms = [self.guard_atom()]
            while self.accept("&&"):
                atoms.append(self.guard_atom())
            self.expect("]")
            guard = tuple(atoms)
        actions = self.actions() if self.accept("/") else ()
        self.expect(";")
        return Transition(source.text, target.text, guard, actions, source.loc)

    def guard_atom(self) -> GuardAtom:
        port = self.ident("input port name")
        if not (self.tok.kind == "sym" and self.tok.text in GUARD_OPERATORS):
            raise self.fail("comparison operator")
        op = self.advance().text
        return GuardAtom(port.text, op, self.literal(), port.loc)

    def actions(self) -> tuple[Action, ...]:
        self.expect("{")
        result = [self.action()]
        while self.accept(","):
            result.append(self.action())
        self.expect("}")
        return tuple(result)

    def action(self) -> Action:
        port = self.ident("output port name")
        self.expect("=")
        return Action(port.text, self.literal(), port.loc)


def parse_architecture(unit: SourceUnit) -> ComponentType:
    component = _ArchitectureParser(unit.text, unit.path).component()
    stem = Path(unit.path).stem
    if stem != component.name:
        raise NameMismatch(
            f"component type '{component.name}' must be declared in a file named {component.name}.arc",
            component.loc,
        )
    return component


# -- class diagrams --------------------------------------------------------


class _ClassDiagramParser(_Parser):
    def diagram(self) -> ClassDiagram:
        self.expect("classdiagram")
        name = self.ident("class diagram name")
        self.expect("{")
        enums: list[EnumDecl] = []
        records: list[RecordDecl] = []
        while not self.at("}"):
            if self.at("enum"):
                enums.append(self.enum())
            elif self.at("class"):
                records.append(self.record())
            else:
                raise self.fail("'enum', 'class' or '}'")
        self.expect("}")
        self.end()
        return ClassDiagram(name.text, tuple(enums), tuple(records), name.loc)

    def enum(self) -> EnumDecl:
        self.expect("enum")
        name = self.ident("enum name")
        self.expect("{")
        literals = [self.ident("enum literal")]
        while self.accept(","):
            literals.append(self.ident("enum literal"))
        self.expect(";")
        self.expect("}")
        seen: set[str] = set()
        for lit in literals:
            if lit.text in seen:
                raise DuplicateLiteral(f"duplicate literal '{lit.text}' in enum {name.text}", lit.loc)
            seen.add(lit.text)
        return EnumDecl(name.text, tuple(lit.text for lit in literals), name.loc)

    def record(self) -> RecordDecl:
        self.expect("class")
        name = self.ident("class name")
        self.reject_parameters(name.text)
        self.expect("{")
        fields = []
        while not self.at("}"):
            type_name = self.ident("field type or '}'")
            field_name = self.ident("field name")
            self.expect(";")
            fields.append(FieldDecl(field_name.text, type_name.text, field_name.loc))
        self.expect("}")
        return RecordDecl(name.text, tuple(fields), name.loc)


def parse_class_diagram(unit: SourceUnit) -> ClassDiagram:
    return _ClassDiagramParser(unit.text, unit.path).diagram()


# -- application configurations -------------------------------------------


class _AppParser(_Parser):
    def application(self) -> ApplicationConfiguration:
        imports = []
        while self.at("import"):
            imports.append(self.wildcard_import().text)
        self.expect("application")
        name = self.ident("application name")
        self.expect("{")
        self.expect("generators")
        generators = [self.ident("generator name").text]
        while self.accept(","):
            generators.append(self.ident("generator name").text)
        self.expect(";")
        self.expect("bindings")
        bindings = [self.binding()]
        while self.accept(","):
            bindings.append(self.binding())
        self.expect(";")
        self.expect("}")
        self.end()
        seen: set[str] = set()
        for b in bindings:
            if b.instance in seen:
                raise DuplicateBinding(f"instance {b.instance} is bound more than once", b.loc)
            seen.add(b.instance)
        return ApplicationConfiguration(
            name.text, tuple(imports), tuple(generators), tuple(bindings), name.loc
        )

    def binding(self) -> Binding:
        self.expect("map")
        first = self.ident("qualified instance name")
        parts = [first.text]
        while self.accept("."):
            parts.append(self.ident("instance name").text)
        self.expect("to")
        impl = self.ident("implementation name")
        return Binding(".".join(parts), impl.text, first.loc)


def parse_app_config(unit: SourceUnit) -> ApplicationConfiguration:
    return _AppParser(unit.text, unit.path).application()


# -- library properties ----------------------------------------------------


class _LibParser(_Parser):
    def library(self) -> CodeLibraryManifest:
        self.expect("library")
        name = self.ident("library name")
        self.expect("{")
        self.expect("rte")
        rte = self.ident("runtime environment name")
        self.expect(";")
        impls: list[Implementation] = []
        while self.at("implementation"):
            impls.append(self.implementation())
        self.expect("}")
        self.end()
        seen: set[str] = set()
        for impl in impls:
            if impl.name in seen:
                raise DuplicateImplementation(
                    f"implementation '{impl.name}' declared twice in library {name.text}", impl.loc
                )
            seen.add(impl.name)
        return CodeLibraryManifest(name.text, rte.text, tuple(impls), name.loc)

    def implementation(self) -> Implementation:
        self.expect("implementation")
        name = self.ident("implementation name")
        self.expect("implements")
        implements = self.ident("component type name")
        kind = None
        if self.accept("kind"):
            kind_name = self.ident("stub kind")
            parameter = None
            if self.accept("("):
                if self.tok.kind != "int":
                    raise self.fail("integer parameter")
                parameter = int(self.advance().text)
                self.expect(")")
            kind = StubKind(kind_name.text, parameter)
        self.expect(";")
        return Implementation(name.text, implements.text, kind, name.loc)


def parse_lib_props(unit: SourceUnit) -> CodeLibraryManifest:
    return _LibParser(unit.text, unit.path).library()


def parse_unit(unit: SourceUnit):
    return {
        UnitKind.ARCHITECTURE: parse_architecture,
        UnitKind.CLASSDIAGRAM: parse_class_diagram,
        UnitKind.APPCONFIG: parse_app_config,
        UnitKind.LIBPROPS: parse_lib_props,
    }[unit.kind](unit)


def parse_text(text: str, path: str):
    """Parse ``text`` as the language implied by the extension of ``path``."""
    return parse_unit(SourceUnit.from_text(text, path))

