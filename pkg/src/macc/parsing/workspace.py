"""Loading model paths and code library paths into one workspace."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from macc.diagnostics import Diagnostic, Location, MaccError, error
from macc.model import ArchitectureModel, ClassDiagram, CodeLibraryManifest, ComponentType
from macc.parsing.lexer import ParseError
from macc.parsing.parser import SourceUnit, parse_architecture, parse_class_diagram, parse_lib_props


class WorkspaceIoError(MaccError):
    code = "IoError"


@dataclass(frozen=True)
class Workspace:
    model: ArchitectureModel
    libraries: tuple[CodeLibraryManifest, ...]
    diagnostics: tuple[Diagnostic, ...]

    def library(self, name: str) -> CodeLibraryManifest | None:
        return next((lib for lib in self.libraries if lib.name == name), None)


def _check_dirs(paths: Iterable[str | Path]) -> list[Path]:
    dirs = [Path(p) for p in paths]
    for d in dirs:
        if not d.is_dir():
            raise WorkspaceIoError(f"not a readable directory: {d}")
    return dirs


def _files(root: Path, suffixes: tuple[str, ...], recursive: bool = True) -> list[Path]:
    pattern = root.rglob("*") if recursive else root.glob("*")
    return sorted((p for p in pattern if p.is_file() and p.suffix in suffixes), key=lambda p: p.as_posix())


def _read(path: Path, diagnostics: list[Diagnostic]) -> SourceUnit | None:
    try:
        return SourceUnit.read(path)
    except (OSError, UnicodeDecodeError) as exc:
        diagnostics.append(error("IoError", _file_loc(path), f"cannot read file: {exc}"))
        return None


def _file_loc(path: Path) -> Location:
    return Location(str(path), 1, 1)


def load_workspace(model_paths: Iterable[str | Path], library_paths: Iterable[str | Path]) -> Workspace:
    """Parse every .arc/.cd under the model paths and every .lib under the
    library paths. ``import Lib.*;`` in architecture files pulls in the model
    library directory named ``Lib`` found under either path list.

    Individual file failures become diagnostics; loading continues.
    """
    model_dirs = _check_dirs(model_paths)
    library_dirs = _check_dirs(library_paths)
    diagnostics: list[Diagnostic] = []
    components: list[ComponentType] = []
    diagrams: list[ClassDiagram] = []
    loaded: set[Path] = set()

    def load_models(files: list[Path]) -> None:
        for path in files:
            key = path.resolve()
            if key in loaded:
                continue
            loaded.add(key)
            unit = _read(path, diagnostics)
            if unit is None:
                continue
            try:
                if path.suffix == ".arc":
                    components.append(parse_architecture(unit))
                else:
                    diagrams.append(parse_class_diagram(unit))
            except ParseError as exc:
                diagnostics.append(exc.to_diagnostic())

    for d in model_dirs:
        load_models(_files(d, (".arc", ".cd")))

    resolved: set[str] = set()
    search_roots = model_dirs + library_dirs
    pending = 0
    while pending < len(components):
        component = components[pending]
        pending += 1
        for name in component.imports:
            if name in resolved:
                continue
            candidates = [d for root in search_roots for d in _named_dirs(root, name)]
            if not candidates:
                diagnostics.append(
                    error("UnresolvedImport", component.loc, f"no model library directory named '{name}'")
                )
                continue
            resolved.add(name)
            for d in candidates:
                load_models(_files(d, (".arc", ".cd")))

    libraries: list[CodeLibraryManifest] = []
    for d in library_dirs:
        for path in _files(d, (".lib",)):
            unit = _read(path, diagnostics)
            if unit is None:
                continue
            try:
                libraries.append(parse_lib_props(unit))
            except ParseError as exc:
                diagnostics.append(exc.to_diagnostic())

    model = ArchitectureModel(tuple(components), tuple(diagrams))
    return Workspace(model, tuple(libraries), tuple(diagnostics))


def _named_dirs(root: Path, name: str) -> list[Path]:
    found = [root] if root.name == name else []
    found += sorted((p for p in root.rglob(name) if p.is_dir()), key=lambda p: p.as_posix())
    return found
