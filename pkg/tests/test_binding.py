import random
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from conftest import load_app
from support import bind_all, random_architecture
from macc.binding import (
    GENERATED,
    UNBOUND,
    UnresolvedInstance,
    apply_binding,
    binding_table,
    render_binding_table,
)
from macc.model import ApplicationConfiguration, Binding, Classification, instantiate


def test_reference_bindings(workspace, tree):
    bound = apply_binding(tree, load_app("NXTJavaBumperBot.app"), workspace.libraries)
    impls = {n.name: n.binding.implementation for n in bound.walk() if n.binding}
    assert impls == {
        "sensor": "UltraSonicSensor",
        "clock": "JavaTimer",
        "leftMotor": "RegulatedMotor",
        "rightMotor": "RegulatedMotor",
    }
    assert all(n.binding is None for n in tree.walk())


def test_identity_without_abstract_instances(model):
    tree = instantiate(model, "BumpControl")
    assert apply_binding(tree, ApplicationConfiguration("E", (), ("g",), ()), []) == tree


def test_unresolved_instance(workspace, tree):
    config = replace(load_app("nxt-a.app"), bindings=(Binding("BumperBot.wheel", "RegulatedMotor"),))
    with pytest.raises(UnresolvedInstance):
        apply_binding(tree, config, workspace.libraries)


def test_binding_table(bound_trees, tree, model):
    rows = binding_table(bound_trees["nxt-a"])
    assert [r[0] for r in rows] == [
        "BumperBot.sensor", "BumperBot.clock", "BumperBot.controller", "BumperBot.leftMotor", "BumperBot.rightMotor",
    ]
    assert rows[2][1] == GENERATED
    assert str(rows[0][1]) == "NXTJava.UltraSonicSensor"
    assert [str(r[1]) for r in binding_table(tree) if r[0] != "BumperBot.controller"] == [UNBOUND] * 4
    assert binding_table(instantiate(model, "BumpControl")) == [("BumpControl", GENERATED)]
    text = render_binding_table(rows)
    assert "BumperBot.controller" in text and text.endswith("\n")


def test_shared_implementation_distinct_nodes(bound_trees):
    bound = bound_trees["nxt-a"]
    left, right = bound.find("BumperBot.leftMotor"), bound.find("BumperBot.rightMotor")
    assert left.binding == right.binding
    assert left != right


def test_generator_agnostic(workspace, tree):
    config = load_app("nxt-a.app")
    other = replace(config, generators=("ComponentJava", "AutomatonJava", "CDJava"))
    assert apply_binding(tree, config, workspace.libraries) == apply_binding(tree, other, workspace.libraries)


@settings(max_examples=50)
@given(st.integers(min_value=0, max_value=2**32))
def test_idempotent_and_structure_preserving(seed):
    rng = random.Random(seed)
    model, root, library = random_architecture(rng)
    tree = instantiate(model, root)
    config = bind_all(tree, library, rng)
    once = apply_binding(tree, config, [library])
    assert apply_binding(once, config, [library]) == once
    for before, after in zip(tree.walk(), once.walk()):
        assert replace(after, binding=None, children=()) == replace(before, children=())
        assert (after.binding is not None) == (after.classification is Classification.ABSTRACT)
