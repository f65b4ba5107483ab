"""Front ends for the architecture, class diagram, application configuration
and library properties languages."""

from macc.parsing.lexer import ParseError
from macc.parsing.parser import (
    DuplicateBinding,
    DuplicateImplementation,
    DuplicateLiteral,
    NameMismatch,
    SourceUnit,
    UnitKind,
    UnsupportedFeature,
    parse_app_config,
    parse_architecture,
    parse_class_diagram,
    parse_lib_props,
    parse_text,
    parse_unit,
)
from macc.parsing.printer import format_literal, pretty_print
from macc.parsing.workspace import Workspace, WorkspaceIoError, load_workspace

__all__ = [
    "DuplicateBinding",
    "DuplicateImplementation",
    "DuplicateLiteral",
    "NameMismatch",
    "ParseError",
    "SourceUnit",
    "UnitKind",
    "UnsupportedFeature",
    "Workspace",
    "WorkspaceIoError",
    "format_literal",
    "load_workspace",
    "parse_app_config",
    "parse_architecture",
    "parse_class_diagram",
    "parse_lib_props",
    "parse_text",
    "parse_unit",
    "pretty_print",
]
