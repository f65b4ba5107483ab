import random

import pytest
from hypothesis import given, settings, strategies as st

from support import random_architecture, wrap_controller
from macc.model import (
    ArchitectureModel,
    Automaton,
    Classification,
    ComponentType,
    Endpoint,
    RecursiveComposition,
    Subcomponent,
    UnknownRootType,
    Wire,
    classify,
    flatten,
    instantiate,
)


def test_classify_examples(model):
    assert classify(model.component("BumperBot")) is Classification.COMPOSED
    assert classify(model.component("BumpControl")) is Classification.FULLY_MODELED
    assert classify(model.component("DistSensor")) is Classification.ABSTRACT


def test_instantiate_bumperbot(tree):
    assert tree.qualified_name == "BumperBot"
    assert [c.qualified_name for c in tree.children] == [
        "BumperBot.sensor",
        "BumperBot.clock",
        "BumperBot.controller",
        "BumperBot.leftMotor",
        "BumperBot.rightMotor",
    ]
    assert all(n.binding is None for n in tree.walk())


def test_instantiate_atomic_root(model):
    tree = instantiate(model, "DistSensor")
    assert tree.children == ()
    assert tree.classification is Classification.ABSTRACT


def test_instantiate_errors():
    loop = ArchitectureModel((ComponentType("A", subcomponents=(Subcomponent("a", "A"),)),))
    with pytest.raises(RecursiveComposition):
        instantiate(loop, "A")
    indirect = ArchitectureModel(
        (
            ComponentType("A", subcomponents=(Subcomponent("b", "B"),)),
            ComponentType("B", subcomponents=(Subcomponent("a", "A"),)),
        )
    )
    with pytest.raises(RecursiveComposition):
        instantiate(indirect, "A")
    with pytest.raises(UnknownRootType):
        instantiate(loop, "Missing")


# Wires enumerated by hand from BumperBot.arc.
EXPECTED_WIRES = {
    ("sensor", "data", "controller", "distance"),
    ("clock", "signal", "controller", "signal"),
    ("controller", "timer", "clock", "cmd"),
    ("controller", "left", "leftMotor", "cmd"),
    ("controller", "right", "rightMotor", "cmd"),
}


def _wire_set(flat, controller="BumperBot.controller"):
    def short(name):
        return "controller" if name == controller else name.rsplit(".", 1)[-1]

    return {(short(w.source.instance), w.source.port, short(w.target.instance), w.target.port) for w in flat.wires}


def test_flatten_bumperbot(model, tree):
    flat = flatten(tree, model)
    assert len(flat.instances) == 5
    assert _wire_set(flat) == EXPECTED_WIRES
    assert Wire(Endpoint("BumperBot.sensor", "data"), Endpoint("BumperBot.controller", "distance")) in flat.wires


def test_flatten_single_atomic(model):
    flat = flatten(instantiate(model, "BumpControl"), model)
    assert [i.qualified_name for i in flat.instances] == ["BumpControl"]
    assert flat.wires == ()


def test_flatten_two_level_wrapper(wrapped_workspace):
    m = wrapped_workspace.model
    flat = flatten(instantiate(m, "BumperBot"), m)
    assert _wire_set(flat, "BumperBot.controller.core.inner") == EXPECTED_WIRES


@given(st.integers(min_value=0, max_value=4))
def test_wire_count_independent_of_wrapping(model, layers):
    wrapped = wrap_controller(model, layers)
    flat = flatten(instantiate(wrapped, "BumperBot"), wrapped)
    ctrl = "BumperBot.controller" + ".inner" * layers
    assert len(flat.wires) == len(EXPECTED_WIRES)
    assert _wire_set(flat, ctrl) == EXPECTED_WIRES


def _count(model, type_name):
    # independent brute-force count straight from the declarations
    return 1 + sum(_count(model, s.type_name) for s in model.component(type_name).subcomponents)


@settings(max_examples=60)
@given(st.integers(min_value=0, max_value=2**32))
def test_tree_properties_on_random_architectures(seed):
    model, root, _ = random_architecture(random.Random(seed))
    tree = instantiate(model, root)
    nodes = list(tree.walk())
    assert len(nodes) == _count(model, root)
    names = [n.qualified_name for n in nodes]
    assert len(set(names)) == len(names)
    name_set = set(names)
    for name in names:
        if "." in name:
            assert name.rsplit(".", 1)[0] in name_set
    for component in model.components:
        # partition: exactly one classification
        assert classify(component) in set(Classification)


def test_classify_partition_covers_all_shapes():
    cases = {
        Classification.COMPOSED: ComponentType("C", subcomponents=(Subcomponent("x", "L"),)),
        Classification.FULLY_MODELED: ComponentType("F", behavior=Automaton(("S",), "S")),
        Classification.ABSTRACT: ComponentType("L"),
    }
    for expected, component in cases.items():
        assert classify(component) is expected
