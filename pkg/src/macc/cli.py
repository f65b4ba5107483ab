"""Command-line front end: check, bind, generate and simulate.

Exit codes: 0 success, 1 model or configuration errors, 2 usage errors,
3 I/O failures. Diagnostics go to stderr; tables, paths and traces to stdout.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from macc.binding import apply_binding, binding_table, render_binding_table
from macc.checks import check_architecture, check_binding
from macc.codegen import CodegenError, WriteError, orchestrate, registry
from macc.diagnostics import Diagnostic, MaccError, sort_diagnostics
from macc.model import ApplicationConfiguration, InstanceNode, ModelError, instantiate
from macc.parsing import ParseError, SourceUnit, Workspace, WorkspaceIoError, load_workspace, parse_app_config
from macc.simulator import SimulationError, load_scenario, run

EXIT_OK, EXIT_MODEL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class _Exit(Exception):
    def __init__(self, code: int):
        self.code = code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="macc",
        description="Check, bind, generate and simulate component & connector architectures.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--models", action="append", default=[], metavar="DIR",
                        help="directory of .arc/.cd models (repeatable)")
    common.add_argument("--libs", action="append", default=[], metavar="DIR",
                        help="directory of model and code libraries (repeatable)")
    common.add_argument("--root", required=True, metavar="TypeName", help="root component type")
    app = argparse.ArgumentParser(add_help=False)
    app.add_argument("--app", required=True, metavar="FILE", help="application configuration (.app)")

    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    sub.add_parser("check", parents=[common], help="load the workspace and run the architecture checks")
    sub.add_parser("bind", parents=[common, app], help="check bindings and print the binding table")
    gen = sub.add_parser("generate", parents=[common, app], help="generate target sources")
    gen.add_argument("--out", required=True, metavar="DIR", help="output directory")
    sim = sub.add_parser(
        "simulate",
        parents=[common, app],
        help="run the bound architecture in the simulation runtime",
        description="Run the architecture in the built-in simulation runtime. The application's "
        "generators clause is ignored; every abstract instance must be bound to an "
        "implementation of a library with 'rte sim;'.",
    )
    sim.add_argument("--scenario", required=True, metavar="FILE", help="scenario JSON file")
    sim.add_argument("--trace", metavar="FILE", help="write the JSON-lines trace here (default: stdout)")
    sim.add_argument("--steps", type=int, metavar="N", help="override the scenario's step count")
    return parser


def _emit(diagnostics: Sequence[Diagnostic]) -> None:
    for d in diagnostics:
        print(d.render(), file=sys.stderr)


def _fail(exc: MaccError, code: int) -> _Exit:
    if exc.location is not None:
        print(exc.to_diagnostic().render(), file=sys.stderr)
    else:
        print(f"error {exc.code} {exc.message}", file=sys.stderr)
    return _Exit(code)


def _check(args) -> Workspace:
    try:
        ws = load_workspace(args.models, args.libs)
    except WorkspaceIoError as exc:
        raise _fail(exc, EXIT_IO) from exc
    load_diags = sort_diagnostics(ws.diagnostics)
    arch = check_architecture(ws.model, args.root)
    _emit(load_diags)
    _emit(arch.diagnostics)
    if any(d.is_error for d in load_diags) or not arch.ok:
        raise _Exit(EXIT_MODEL)
    return ws


def _load_app(path: str) -> ApplicationConfiguration:
    try:
        unit = SourceUnit.read(path)
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error IoError cannot read {path}: {exc}", file=sys.stderr)
        raise _Exit(EXIT_IO) from exc
    except ValueError as exc:
        print(f"error UsageError {exc}", file=sys.stderr)
        raise _Exit(EXIT_USAGE) from exc
    try:
        return parse_app_config(unit)
    except ParseError as exc:
        raise _fail(exc, EXIT_MODEL) from exc


def _bind(args, ws: Workspace, for_simulation: bool = False) -> InstanceNode:
    config = _load_app(args.app)
    try:
        tree = instantiate(ws.model, args.root)
    except ModelError as exc:
        raise _fail(exc, EXIT_MODEL) from exc
    result = check_binding(tree, config, ws.libraries, None if for_simulation else registry())
    _emit(result.diagnostics)
    if not result.ok:
        raise _Exit(EXIT_MODEL)
    args.config = config
    return apply_binding(tree, config, ws.libraries)


def _run(args) -> int:
    ws = _check(args)
    if args.command == "check":
        return EXIT_OK
    if args.command == "bind":
        bound = _bind(args, ws)
        sys.stdout.write(render_binding_table(binding_table(bound)))
        return EXIT_OK
    if args.command == "generate":
        bound = _bind(args, ws)
        try:
            files = orchestrate(bound, ws.model, args.config, args.out)
        except WriteError as exc:
            raise _fail(exc, EXIT_IO) from exc
        except CodegenError as exc:
            raise _fail(exc, EXIT_MODEL) from exc
        for rel in files.paths():
            print(Path(args.out, rel).as_posix())
        return EXIT_OK

    bound = _bind(args, ws, for_simulation=True)
    try:
        scenario = load_scenario(args.scenario)
    except OSError as exc:
        print(f"error IoError cannot read {args.scenario}: {exc}", file=sys.stderr)
        raise _Exit(EXIT_IO) from exc
    except SimulationError as exc:
        raise _fail(exc, EXIT_MODEL) from exc
    if args.steps is not None:
        if args.steps < 0:
            print("error UsageError --steps must be non-negative", file=sys.stderr)
            raise _Exit(EXIT_USAGE)
        scenario = scenario.with_steps(args.steps)
    try:
        trace = run(bound, ws.model, scenario)
    except (SimulationError, ModelError) as exc:
        raise _fail(exc, EXIT_MODEL) from exc
    text = trace.to_jsonl()
    if args.trace is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(args.trace, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error IoError cannot write {args.trace}: {exc}", file=sys.stderr)
        raise _Exit(EXIT_IO) from exc
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return _run(args)
    except _Exit as exc:
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
