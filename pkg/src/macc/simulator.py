"""Built-in simulation runtime (RTE ``sim``).

Execution is time-synchronous. At step t every atomic instance reads the
messages its wired predecessors produced at step t-1 (nothing at step 0) and
produces its own step-t outputs. Composed boundaries are flattened away and
add no delay. A message is either a literal or absent (``None``).

Abstract instances run stubs selected by the ``kind`` of their bound
implementation:

script     emits the scenario's values; list index i is emitted at step i+1
record     emits nothing and logs every present input
table      emits the outputs of the first scenario row matching its inputs
timer(n)   emits ALERT exactly n steps after consuming START
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Sequence

from macc.diagnostics import MaccError
from macc.model import (
    ArchitectureModel,
    Classification,
    ComponentType,
    DataTypeRef,
    EnumLiteral,
    FlatArchitecture,
    InstanceNode,
    Literal,
    TypeKind,
    flatten,
    literal_conforms,
    qualify_literal,
)

SIM_RTE = "sim"
STUB_KINDS = ("script", "record", "table", "timer")

Message = Literal | None
Valuation = dict[str, dict[str, Message]]


class SimulationError(MaccError):
    code = "SimulationError"


class RteMismatch(SimulationError):
    code = "RteMismatch"


class MissingScript(SimulationError):
    code = "MissingScript"


class ScenarioError(SimulationError):
    code = "ScenarioError"


class StubError(SimulationError):
    code = "StubError"


class TypeFault(SimulationError):
    code = "TypeFault"


# -- scenarios -------------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    inputs: Mapping[str, Any]
    outputs: Mapping[str, Any]


@dataclass(frozen=True)
class Scenario:
    """Untyped scenario content; values are decoded against port types when
    the runtime is initialized."""

    steps: int
    scripts: Mapping[str, Mapping[str, Sequence[Any]]] = field(default_factory=dict)
    tables: Mapping[str, Sequence[TableRow]] = field(default_factory=dict)

    @classmethod
    def from_json(cls, data: Any) -> Scenario:
        if not isinstance(data, dict):
            raise ScenarioError("scenario must be a JSON object")
        steps = data.get("steps")
        if not isinstance(steps, int) or isinstance(steps, bool) or steps < 0:
            raise ScenarioError("scenario 'steps' must be a non-negative integer")
        scripts = data.get("scripts", {})
        if not isinstance(scripts, dict) or not all(
            isinstance(ports, dict) and all(isinstance(v, list) for v in ports.values())
            for ports in scripts.values()
        ):
            raise ScenarioError("scenario 'scripts' must map instance -> port -> list of values")
        tables: dict[str, list[TableRow]] = {}
        for name, rows in data.get("tables", {}).items():
            try:
                tables[name] = [TableRow(dict(r.get("in", {})), dict(r.get("out", {}))) for r in rows]
            except (AttributeError, TypeError, ValueError) as exc:
                raise ScenarioError(f"malformed table rows for {name}: {exc}") from exc
        unknown = set(data) - {"steps", "scripts", "tables"}
        if unknown:
            raise ScenarioError(f"unknown scenario keys: {', '.join(sorted(unknown))}")
        return cls(steps, scripts, tables)

    def with_steps(self, steps: int) -> Scenario:
        return replace(self, steps=steps)


def load_scenario(path: str | Path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}: invalid JSON: {exc}") from exc
    return Scenario.from_json(data)


def decode_value(value: Any, type_ref: DataTypeRef, model: ArchitectureModel) -> Message:
    """Turn a JSON scenario value into a message of the given port type."""
    if value is None:
        return None
    decoded: Any = value
    if type_ref.kind is TypeKind.ENUM and isinstance(value, str):
        enum, _, literal = value.rpartition(".")
        decoded = EnumLiteral(type_ref.name, literal) if enum in ("", type_ref.name) else None
    elif type_ref.name == "Double" and isinstance(value, int) and not isinstance(value, bool):
        decoded = float(value)
    if decoded is None or not literal_conforms(decoded, type_ref, model):
        raise ScenarioError(f"value {json.dumps(value)} is not a {type_ref.name}")
    return decoded


def encode_value(message: Message) -> Any:
    if isinstance(message, EnumLiteral):
        return str(message)
    return message


# -- behaviors -------------------------------------------------------------


class Behavior:
    def initial(self) -> Any:
        return None

    def react(self, local: Any, inputs: Mapping[str, Message], step: int) -> tuple[Any, dict[str, Message]]:
        raise NotImplementedError


def _holds(message: Message, operator: str, literal: Literal) -> bool:
    if message is None:
        return False
    if operator == "==":
        return message == literal
    if operator == "!=":
        return message != literal
    if operator == "<":
        return message < literal
    if operator == ">":
        return message > literal
    if operator == "<=":
        return message <= literal
    return message >= literal


class AutomatonBehavior(Behavior):
    """Interprets an embedded automaton. Step 0 emits the initial actions;
    afterwards the first enabled transition in declaration order fires, and
    if none is enabled the automaton stutters with absent outputs."""

    def __init__(self, component: ComponentType, model: ArchitectureModel):
        automaton = component.behavior
        assert automaton is not None
        types = {p.name: model.resolve_type(p.type) for p in component.ports}

        def q(port: str, value: Literal) -> Literal:
            return qualify_literal(value, types[port]) if types.get(port) else value

        self.initial_state = automaton.initial
        self.initial_outputs = {a.port: q(a.port, a.literal) for a in automaton.initial_actions}
        self.transitions = [
            (
                t.source,
                t.target,
                [(g.port, g.operator, q(g.port, g.literal)) for g in t.guard],
                {a.port: q(a.port, a.literal) for a in t.actions},
            )
            for t in automaton.transitions
        ]

    def initial(self) -> str:
        return self.initial_state

    def react(self, local, inputs, step):
        if step == 0:
            return local, dict(self.initial_outputs)
        for source, target, guard, actions in self.transitions:
            if source == local and all(_holds(inputs.get(p), op, lit) for p, op, lit in guard):
                return target, dict(actions)
        return local, {}


class ScriptStub(Behavior):
    def __init__(self, values: Mapping[str, Sequence[Message]]):
        self.values = values

    def react(self, local, inputs, step):
        out: dict[str, Message] = {}
        for port, values in self.values.items():
            if 1 <= step <= len(values):
                out[port] = values[step - 1]
        return local, out


class RecordStub(Behavior):
    """Logs (step, port, message) for every present input."""

    def initial(self) -> tuple:
        return ()

    def react(self, local, inputs, step):
        entries = tuple((step, port, inputs[port]) for port in sorted(inputs) if inputs[port] is not None)
        return local + entries, {}


class TableStub(Behavior):
    def __init__(self, rows: Sequence[tuple[dict[str, Message], dict[str, Message]]]):
        self.rows = rows

    def react(self, local, inputs, step):
        for match, out in self.rows:
            if all(inputs.get(port) == value for port, value in match.items()):
                return local, dict(out)
        return local, {}


class TimerStub(Behavior):
    """Local state is the step at which the next ALERT is due. A START
    consumed while counting down restarts the countdown."""

    def __init__(self, delay: int, start_port: str, start: EnumLiteral, alert_port: str, alert: EnumLiteral):
        self.delay = delay
        self.start_port = start_port
        self.start = start
        self.alert_port = alert_port
        self.alert = alert

    def react(self, local, inputs, step):
        out = {self.alert_port: self.alert} if local == step else {}
        due = None if local == step else local
        if inputs.get(self.start_port) == self.start:
            due = step + self.delay
        return due, out


# -- runtime ---------------------------------------------------------------


@dataclass(frozen=True)
class TraceStep:
    step: int
    ports: Valuation

    def to_json(self) -> str:
        outputs = {
            name: {port: encode_value(msg) for port, msg in ports.items()} for name, ports in self.ports.items()
        }
        return json.dumps({"step": self.step, "outputs": outputs}, sort_keys=True)


@dataclass(frozen=True)
class SimulationTrace:
    steps: tuple[TraceStep, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def to_jsonl(self) -> str:
        return "".join(s.to_json() + "\n" for s in self.steps)

    def stream(self, instance: str, port: str) -> list[Message]:
        return [s.ports[instance][port] for s in self.steps]


@dataclass(frozen=True)
class RuntimeState:
    flat: FlatArchitecture
    types: Mapping[str, ComponentType]
    behaviors: Mapping[str, Behavior]
    model: ArchitectureModel
    step_index: int = 0
    locals: Mapping[str, Any] = field(default_factory=dict)
    last_outputs: Mapping[str, Mapping[str, Message]] = field(default_factory=dict)
    trace: SimulationTrace = SimulationTrace()

    def log(self, instance: str) -> tuple:
        """Recorder log of a record-kind instance."""
        return self.locals[instance]


def _port_types(component: ComponentType, model: ArchitectureModel) -> dict[str, DataTypeRef]:
    types = {}
    for port in component.ports:
        ref = model.resolve_type(port.type)
        if ref is None:
            raise TypeFault(f"port {component.name}.{port.name} has unresolved type {port.type}")
        types[port.name] = ref
    return types


def _stub(node: InstanceNode, component: ComponentType, model: ArchitectureModel, scenario: Scenario) -> Behavior:
    ref = node.binding
    if ref is None:
        raise StubError(f"abstract instance {node.qualified_name} is not bound")
    if ref.rte != SIM_RTE:
        raise RteMismatch(
            f"instance {node.qualified_name} is bound to {ref} for runtime environment '{ref.rte}', not '{SIM_RTE}'"
        )
    kind = ref.kind
    if kind is None or kind.name not in STUB_KINDS:
        raise StubError(f"implementation {ref} has no simulation stub kind (one of {', '.join(STUB_KINDS)})")
    if kind.name != "timer" and kind.parameter is not None:
        raise StubError(f"stub kind {kind.name} of {ref} takes no parameter")
    types = _port_types(component, model)
    name = node.qualified_name

    if kind.name == "script":
        if name not in scenario.scripts:
            raise MissingScript(f"scenario has no script for {name} (bound to {ref})")
        values = {}
        for port, raw in scenario.scripts[name].items():
            decl = component.port(port)
            if decl is None or decl not in component.out_ports():
                raise ScenarioError(f"script for {name} names '{port}', which is not an out-port")
            values[port] = tuple(decode_value(v, types[port], model) for v in raw)
        return ScriptStub(values)
    if kind.name == "record":
        return RecordStub()
    if kind.name == "table":
        rows = []
        for row in scenario.tables.get(name, ()):
            decoded = []
            for mapping, ports in ((row.inputs, component.in_ports()), (row.outputs, component.out_ports())):
                allowed = {p.name for p in ports}
                bad = set(mapping) - allowed
                if bad:
                    raise ScenarioError(f"table row for {name} names unknown or misdirected ports {sorted(bad)}")
                decoded.append({p: decode_value(v, types[p], model) for p, v in mapping.items()})
            rows.append((decoded[0], decoded[1]))
        return TableStub(rows)

    if kind.parameter is None or kind.parameter <= 0:
        raise StubError(f"timer stub {ref} needs a positive step count")

    def port_with(literal: str, ports) -> tuple[str, EnumLiteral] | None:
        for port in ports:
            enum = model.enum(port.type)
            if enum is not None and literal in enum.literals:
                return port.name, EnumLiteral(enum.name, literal)
        return None

    start = port_with("START", component.in_ports())
    alert = port_with("ALERT", component.out_ports())
    if start is None or alert is None:
        raise StubError(
            f"timer stub for {name} needs an in-port accepting START and an out-port accepting ALERT"
        )
    return TimerStub(kind.parameter, start[0], start[1], alert[0], alert[1])


def init_runtime(bound_tree: InstanceNode, model: ArchitectureModel, scenario: Scenario) -> RuntimeState:
    flat = flatten(bound_tree, model)
    types: dict[str, ComponentType] = {}
    behaviors: dict[str, Behavior] = {}
    for node in flat.instances:
        component = model.component(node.type_name)
        if component is None:
            raise SimulationError(f"unknown component type {node.type_name}")
        types[node.qualified_name] = component
        if node.classification is Classification.FULLY_MODELED:
            behaviors[node.qualified_name] = AutomatonBehavior(component, model)
        else:
            behaviors[node.qualified_name] = _stub(node, component, model, scenario)
    for name in list(scenario.scripts) + list(scenario.tables):
        if name not in behaviors:
            raise ScenarioError(f"scenario refers to unknown atomic instance {name}")
    for name in scenario.scripts:
        if not isinstance(behaviors[name], ScriptStub):
            raise ScenarioError(f"scenario scripts {name}, which is not bound to a script-kind implementation")
    for name in scenario.tables:
        if not isinstance(behaviors[name], TableStub):
            raise ScenarioError(f"scenario has table rows for {name}, which is not bound to a table-kind implementation")
    local = {name: b.initial() for name, b in behaviors.items()}
    return RuntimeState(flat, types, behaviors, model, locals=local)


def step(state: RuntimeState, order: Sequence[str] | None = None) -> RuntimeState:
    """Advance one time step. ``order`` permutes instance evaluation; results
    never depend on it because inputs are read from the previous step."""
    t = state.step_index
    drivers = {(w.target.instance, w.target.port): w.source for w in state.flat.wires}
    names = list(order) if order is not None else [n.qualified_name for n in state.flat.instances]
    locals_: dict[str, Any] = {}
    outputs: dict[str, dict[str, Message]] = {}
    valuation: Valuation = {}
    for name in names:
        component = state.types[name]
        inputs: dict[str, Message] = {}
        for port in component.in_ports():
            src = drivers.get((name, port.name))
            inputs[port.name] = state.last_outputs[src.instance][src.port] if (src and t > 0) else None
        local, produced = state.behaviors[name].react(state.locals[name], inputs, t)
        produced_all: dict[str, Message] = {}
        for port in component.out_ports():
            message = produced.pop(port.name, None)
            if message is not None:
                ref = state.model.resolve_type(port.type)
                if ref is None or not literal_conforms(message, ref, state.model):
                    raise TypeFault(f"{name}.{port.name} of type {port.type} received {message!r} at step {t}")
            produced_all[port.name] = message
        if produced:
            raise TypeFault(f"{name} produced messages on unknown out-ports {sorted(produced)}")
        locals_[name] = local
        outputs[name] = produced_all
        valuation[name] = {**inputs, **produced_all}
    trace = SimulationTrace(state.trace.steps + (TraceStep(t, valuation),))
    return replace(state, step_index=t + 1, locals=locals_, last_outputs=outputs, trace=trace)


def run(
    bound_tree: InstanceNode, model: ArchitectureModel, scenario: Scenario, steps: int | None = None
) -> SimulationTrace:
    state = init_runtime(bound_tree, model, scenario)
    for _ in range(scenario.steps if steps is None else steps):
        state = step(state)
    return state.trace
