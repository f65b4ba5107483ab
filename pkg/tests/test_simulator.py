import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import FIXTURES
from macc.binding import apply_binding
from macc.model import (
    ArchitectureModel,
    CodeLibraryManifest,
    EnumLiteral,
    Implementation,
    StubKind,
    instantiate,
)
from macc.parsing import parse_text
from macc.simulator import (
    MissingScript,
    RteMismatch,
    Scenario,
    init_runtime,
    load_scenario,
    run,
    step,
)

SCENARIO = FIXTURES / "scenarios" / "bumperbot.json"
F, B = EnumLiteral("MotorCmd", "FORWARD"), EnumLiteral("MotorCmd", "BACKWARD")


def _commands(trace, motor):
    return [(t, c) for t, c in enumerate(trace.stream(f"BumperBot.{motor}", "cmd")) if c is not None]


def test_runtime_init(bound_trees, model):
    state = init_runtime(bound_trees["sim"], model, load_scenario(SCENARIO))
    assert len(state.flat.instances) == 5


def test_zero_steps(bound_trees, model):
    trace = run(bound_trees["sim"], model, load_scenario(SCENARIO).with_steps(0))
    assert len(trace) == 0 and trace.to_jsonl() == ""


def test_missing_script(bound_trees, model):
    with pytest.raises(MissingScript):
        init_runtime(bound_trees["sim"], model, Scenario(3))


def test_rte_mismatch(bound_trees, model):
    with pytest.raises(RteMismatch):
        init_runtime(bound_trees["nxt-a"], model, load_scenario(SCENARIO))


def test_no_guard_fires_at_distance_100(bound_trees, model):
    # the sensor produces its first reading at step 1; the controller sees it at step 2
    trace = run(bound_trees["sim"], model, load_scenario(SCENARIO).with_steps(4))
    assert trace.steps[1].ports["BumperBot.controller"]["distance"] is None
    for t in (2, 3):
        assert trace.steps[t].ports["BumperBot.controller"]["distance"] == 100
        outs = trace.steps[t].ports["BumperBot.controller"]
        assert (outs["left"], outs["right"], outs["timer"]) == (None, None, None)


def test_full_cycle_14_steps(bound_trees, model):
    trace = run(bound_trees["sim"], model, load_scenario(SCENARIO).with_steps(14))
    assert _commands(trace, "leftMotor") == [(1, F), (5, B), (9, F), (13, F)]
    assert _commands(trace, "rightMotor") == [(1, F), (5, B), (9, B), (13, F)]
    alerts = [t for t, v in enumerate(trace.stream("BumperBot.clock", "signal")) if v is not None]
    assert alerts == [7, 11]


def test_recorder_isolation(bound_trees, model):
    state = init_runtime(bound_trees["sim"], model, load_scenario(SCENARIO))
    for _ in range(10):
        state = step(state)
    left, right = state.log("BumperBot.leftMotor"), state.log("BumperBot.rightMotor")
    assert left == ((1, "cmd", F), (5, "cmd", B), (9, "cmd", F))
    assert right == ((1, "cmd", F), (5, "cmd", B), (9, "cmd", B))


def test_determinism(bound_trees, model):
    scenario = load_scenario(SCENARIO)
    assert run(bound_trees["sim"], model, scenario).to_jsonl() == run(bound_trees["sim"], model, scenario).to_jsonl()


@settings(max_examples=20)
@given(st.randoms(use_true_random=False))
def test_order_independence(bound_trees, model, rnd):
    scenario = load_scenario(SCENARIO)
    state = init_runtime(bound_trees["sim"], model, scenario)
    shuffled = init_runtime(bound_trees["sim"], model, scenario)
    names = [n.qualified_name for n in state.flat.instances]
    for _ in range(scenario.steps):
        state = step(state)
        order = names[:]
        rnd.shuffle(order)
        shuffled = step(shuffled, order)
    assert state.trace.to_jsonl() == shuffled.trace.to_jsonl()


def test_trace_shape_and_types(bound_trees, model):
    trace = run(bound_trees["sim"], model, load_scenario(SCENARIO))
    assert [s.step for s in trace.steps] == list(range(10))
    for s in trace.steps:
        for name, ports in s.ports.items():
            component = model.component(bound_trees["sim"].find(name).type_name)
            assert set(ports) == {p.name for p in component.ports}
            for port, value in ports.items():
                if value is None:
                    continue
                declared = model.component(component.name).port(port).type
                if declared == "Integer":
                    assert type(value) is int
                else:
                    assert isinstance(value, EnumLiteral) and value.enum == declared
    for line in trace.to_jsonl().splitlines():
        obj = json.loads(line)
        assert list(obj) == ["outputs", "step"]


# A tiny architecture of one script stub and an automaton, for tie-break and
# absence semantics.
PROBE = """component Probe {
  port in Integer x; port out Integer y;
  automaton {
    state S, T;
    initial S;
    S -> S [x > 0] / {y = 1};
    S -> S [x > 5] / {y = 2};
    S -> T [x != 0] / {y = 3};
  }
}"""
SOURCE = "component Source { port out Integer x; }"
TOP = """component Top {
  component Source src; component Probe probe;
  connect src.x -> probe.x;
}"""


def _probe_run(values):
    comps = (parse_text(SOURCE, "Source.arc"), parse_text(PROBE, "Probe.arc"), parse_text(TOP, "Top.arc"))
    model = ArchitectureModel(comps)
    lib = CodeLibraryManifest("S", "sim", (Implementation("Src", "Source", StubKind("script")),))
    config = parse_text("import S.*; application A { generators g; bindings map Top.src to Src; }", "A.app")
    bound = apply_binding(instantiate(model, "Top"), config, [lib])
    return run(bound, model, Scenario(len(values) + 2, {"Top.src": {"x": values}}))


def test_tie_break_and_absence():
    trace = _probe_run([None, 9, -1])
    y = trace.stream("Top.probe", "y")
    # value i is produced at step i+1 and consumed at step i+2: x is absent
    # through step 2; at step 3 x = 9 enables the first two (first wins); at
    # step 4 x = -1 enables only the third
    assert y == [None, None, None, 1, 3]


def test_single_script_pass_through():
    trace = _probe_run([4, None, 7])
    assert trace.stream("Top.src", "x") == [None, 4, None, 7, None]


@pytest.mark.parametrize(
    "data",
    [[], {"steps": -1}, {"steps": "3"}, {"steps": 2, "scripts": {"a": [1]}}, {"steps": 1, "extra": 1}],
)
def test_malformed_scenarios(data):
    from macc.simulator import ScenarioError

    with pytest.raises(ScenarioError):
        Scenario.from_json(data)


def test_scenario_unknown_instance(bound_trees, model):
    from macc.simulator import ScenarioError

    raw = json.loads(SCENARIO.read_text())
    raw["scripts"]["BumperBot.ghost"] = {"data": [1]}
    with pytest.raises(ScenarioError):
        init_runtime(bound_trees["sim"], model, Scenario.from_json(raw))


def test_table_stub():
    comps = (
        parse_text("component Source { port out Integer x; }", "Source.arc"),
        parse_text("component Echo { port in Integer x; port out Integer y; }", "Echo.arc"),
        parse_text(
            "component Top { component Source src; component Echo echo; connect src.x -> echo.x; }", "Top.arc"
        ),
    )
    model = ArchitectureModel(comps)
    lib = CodeLibraryManifest(
        "S",
        "sim",
        (Implementation("Src", "Source", StubKind("script")), Implementation("Tab", "Echo", StubKind("table"))),
    )
    config = parse_text(
        "import S.*; application A { generators g; bindings map Top.src to Src, map Top.echo to Tab; }", "A.app"
    )
    bound = apply_binding(instantiate(model, "Top"), config, [lib])
    scenario = Scenario.from_json(
        {"steps": 4, "scripts": {"Top.src": {"x": [1, 2]}}, "tables": {"Top.echo": [{"in": {"x": 2}, "out": {"y": 20}}]}}
    )
    assert run(bound, model, scenario).stream("Top.echo", "y") == [None, None, None, 20]
