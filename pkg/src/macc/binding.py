"""The binding transformation: attach implementation references to the
abstract instances of an instance tree before any code is generated."""

from __future__ import annotations

from typing import Sequence, Union

from macc.diagnostics import MaccError
from macc.model import (
    ApplicationConfiguration,
    Classification,
    CodeLibraryManifest,
    ImplementationRef,
    InstanceNode,
)

GENERATED = "generated"
UNBOUND = "(unbound)"


class BindingError(MaccError):
    code = "BindingError"


class UnresolvedInstance(BindingError):
    code = "UnresolvedInstance"


def resolve_implementation(
    name: str, imports: Sequence[str], libraries: Sequence[CodeLibraryManifest]
) -> ImplementationRef | None:
    for lib in libraries:
        if lib.name not in imports:
            continue
        impl = lib.implementation(name)
        if impl is not None:
            return ImplementationRef(lib.name, impl.name, lib.rte, impl.kind)
    return None


def apply_binding(
    tree: InstanceNode, config: ApplicationConfiguration, libraries: Sequence[CodeLibraryManifest]
) -> InstanceNode:
    """Return a copy of ``tree`` whose abstract nodes carry the configured
    implementation references. The input tree is left untouched."""
    refs: dict[str, ImplementationRef] = {}
    for b in config.bindings:
        node = tree.find(b.instance)
        if node is None:
            raise UnresolvedInstance(f"binding names unknown instance {b.instance}", b.loc)
        if node.classification is not Classification.ABSTRACT:
            raise BindingError(f"instance {b.instance} is not abstract", b.loc)
        ref = resolve_implementation(b.implementation, config.imports, libraries)
        if ref is None:
            raise BindingError(f"implementation '{b.implementation}' not found in imported libraries", b.loc)
        refs[b.instance] = ref

    def rebuild(node: InstanceNode) -> InstanceNode:
        children = tuple(rebuild(c) for c in node.children)
        binding = refs.get(node.qualified_name, node.binding)
        if children == node.children and binding == node.binding:
            return node
        return InstanceNode(node.qualified_name, node.type_name, node.classification, children, binding)

    return rebuild(tree)


Row = tuple[str, Union[ImplementationRef, str]]


def binding_table(tree: InstanceNode) -> list[Row]:
    rows: list[Row] = []
    for node in tree.atomic_nodes():
        if node.classification is Classification.FULLY_MODELED:
            rows.append((node.qualified_name, GENERATED))
        else:
            rows.append((node.qualified_name, node.binding or UNBOUND))
    return rows


def render_binding_table(rows: Sequence[Row]) -> str:
    header = ("QUALIFIED-NAME", "IMPLEMENTATION")
    cells = [header] + [(name, str(impl)) for name, impl in rows]
    width = max(len(name) for name, _ in cells)
    return "".join(f"{name.ljust(width)}  {impl}\n" for name, impl in cells)
