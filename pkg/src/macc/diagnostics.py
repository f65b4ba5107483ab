"""Source locations, diagnostics and their rendering."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True, order=True)
class Location:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


# Used for models built in memory rather than parsed from text.
UNKNOWN = Location("<memory>", 1, 1)


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    location: Location
    message: str

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def render(self) -> str:
        return f"{self.severity.value} {self.code} {self.location} {self.message}"

    def sort_key(self) -> tuple:
        return (self.location.file, self.location.line, self.location.column, self.code)


def error(code: str, location: Location, message: str) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, location, message)


def warning(code: str, location: Location, message: str) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, location, message)


def sort_diagnostics(diagnostics: Iterable[Diagnostic]) -> list[Diagnostic]:
    return sorted(diagnostics, key=Diagnostic.sort_key)


def render_all(diagnostics: Iterable[Diagnostic]) -> str:
    return "".join(d.render() + "\n" for d in diagnostics)


@dataclass(frozen=True)
class CheckReport:
    """Ordered findings of one checking pass."""

    diagnostics: tuple[Diagnostic, ...] = ()

    @property
    def ok(self) -> bool:
        return not any(d.is_error for d in self.diagnostics)

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.is_error]

    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]

    def render(self) -> str:
        return render_all(self.diagnostics)


def report(diagnostics: Iterable[Diagnostic]) -> CheckReport:
    return CheckReport(tuple(sort_diagnostics(diagnostics)))


class MaccError(Exception):
    """Base class for operational errors raised by the toolchain."""

    code = "MaccError"

    def __init__(self, message: str, location: Location | None = None):
        super().__init__(message)
        self.message = message
        self.location = location

    def to_diagnostic(self) -> Diagnostic:
        return error(self.code, self.location or UNKNOWN, self.message)
