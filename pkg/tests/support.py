"""Builders for randomized and wrapped architectures used by property tests."""

import random

from macc.model import (
    ApplicationConfiguration,
    ArchitectureModel,
    Automaton,
    Binding,
    CodeLibraryManifest,
    ComponentType,
    Connector,
    Implementation,
    Port,
    PortRef,
    Subcomponent,
)

ABSTRACT_TYPES = ("Leaf0", "Leaf1", "Leaf2")
MODELED_TYPE = "Modeled"


def random_architecture(rng: random.Random, max_depth: int = 4, max_children: int = 5):
    """A random composition tree of at most ``max_depth`` levels with at most
    ``max_children`` children per composed node, plus a library providing two
    implementations per abstract type and a configuration binding every
    abstract instance."""
    components = [ComponentType(name) for name in ABSTRACT_TYPES]
    components.append(ComponentType(MODELED_TYPE, behavior=Automaton(("S",), "S")))
    counter = [0]

    def make(depth: int) -> str:
        counter[0] += 1
        name = f"Composed{counter[0]}"
        subs = []
        for i in range(rng.randint(1, max_children)):
            roll = rng.random()
            if depth + 1 < max_depth and roll < 0.3:
                sub_type = make(depth + 1)
            elif roll < 0.8:
                sub_type = rng.choice(ABSTRACT_TYPES)
            else:
                sub_type = MODELED_TYPE
            subs.append(Subcomponent(f"c{i}", sub_type))
        components.append(ComponentType(name, subcomponents=tuple(subs)))
        return name

    root = make(1)
    model = ArchitectureModel(tuple(components))
    library = CodeLibraryManifest(
        "RandLib",
        "rte-a",
        tuple(Implementation(f"{t}Impl{k}", t) for t in ABSTRACT_TYPES for k in range(2)),
    )
    return model, root, library


def bind_all(tree, library, rng: random.Random) -> ApplicationConfiguration:
    bindings = []
    for node in tree.walk():
        if node.classification.value == "abstract":
            impl = rng.choice([i for i in library.implementations if i.implements == node.type_name])
            bindings.append(Binding(node.qualified_name, impl.name))
    return ApplicationConfiguration(
        "Rand", (library.name,), ("structure-a", "behavior-a", "datatypes-a"), tuple(bindings)
    )


def wrap_controller(model: ArchitectureModel, layers: int) -> ArchitectureModel:
    """Replace BumperBot's controller type with ``layers`` nested pass-through
    composed wrappers around BumpControl; instance names are layer0, layer1..."""
    control = model.component("BumpControl")
    inner_type = control.name
    extra = []
    for level in reversed(range(layers)):
        name = f"Wrap{level}"
        child = "inner"
        conns = [Connector(PortRef(None, p.name), (PortRef(child, p.name),)) for p in control.in_ports()]
        conns += [Connector(PortRef(child, p.name), (PortRef(None, p.name),)) for p in control.out_ports()]
        extra.append(
            ComponentType(
                name,
                ports=tuple(Port(p.name, p.direction, p.type) for p in control.ports),
                subcomponents=(Subcomponent(child, inner_type),),
                connectors=tuple(conns),
            )
        )
        inner_type = name
    bot = model.component("BumperBot")
    subs = tuple(
        Subcomponent(s.name, inner_type if s.name == "controller" else s.type_name) for s in bot.subcomponents
    )
    new_bot = ComponentType(bot.name, bot.ports, subs, bot.connectors, None, bot.imports)
    others = tuple(c for c in model.components if c.name != "BumperBot")
    return ArchitectureModel(others + tuple(extra) + (new_bot,), model.diagrams)


def controller_path(layers: int) -> str:
    return "BumperBot.controller" + ".inner" * layers


def run_negative_case(case):
    """Render every diagnostic of a negative-corpus case; cwd must be the
    fixtures directory so locations stay relative."""
    from pathlib import Path

    from macc.checks import check_architecture, check_binding
    from macc.codegen import registry
    from macc.diagnostics import render_all, sort_diagnostics
    from macc.model import instantiate
    from macc.parsing import SourceUnit, load_workspace, parse_app_config

    case = Path(case)
    models = case / "models" if (case / "models").is_dir() else Path("bumperbot")
    ws = load_workspace([models], ["libs"])
    diags = sort_diagnostics(ws.diagnostics) + list(check_architecture(ws.model, "BumperBot").diagnostics)
    app = case / "case.app"
    if app.exists():
        cfg = parse_app_config(SourceUnit.read(app))
        tree = instantiate(ws.model, "BumperBot")
        diags += list(check_binding(tree, cfg, ws.libraries, registry()).diagnostics)
    return render_all(diags)
