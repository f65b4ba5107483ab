from pathlib import Path

import pytest

from macc.binding import apply_binding
from macc.model import instantiate
from macc.parsing import SourceUnit, load_workspace, parse_app_config

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def in_fixtures(monkeypatch):
    """Run with the fixtures directory as cwd so rendered paths are short."""
    monkeypatch.chdir(FIXTURES)
    return FIXTURES


@pytest.fixture(scope="session")
def workspace():
    return load_workspace([FIXTURES / "bumperbot"], [FIXTURES / "libs"])


@pytest.fixture(scope="session")
def wrapped_workspace():
    return load_workspace([FIXTURES / "bumperbot_wrapped"], [FIXTURES / "libs"])


@pytest.fixture(scope="session")
def model(workspace):
    return workspace.model


@pytest.fixture(scope="session")
def tree(model):
    return instantiate(model, "BumperBot")


def load_app(name):
    return parse_app_config(SourceUnit.read(FIXTURES / "apps" / name))


@pytest.fixture(scope="session")
def bound_trees(workspace, tree):
    return {
        app: apply_binding(tree, load_app(f"{app}.app"), workspace.libraries)
        for app in ("nxt-a", "ros-b", "sim")
    }


# -- one summary line per acceptance criterion ------------------------------

_criteria: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or report.outcome != "passed":
        doc = getattr(report, "criterion", None) or report.nodeid.split("::")[-1]
        prev = _criteria.get(report.nodeid, (doc, "PASS"))[1]
        outcome = "PASS" if report.outcome == "passed" and prev == "PASS" else "FAIL"
        _criteria[report.nodeid] = (doc, outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    doc = (item.function.__doc__ or "").strip().splitlines()
    rep.criterion = doc[0] if doc else item.name
    callspec = getattr(item, "callspec", None)
    if callspec is not None:
        rep.criterion += f" [{callspec.id}]"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for doc, outcome in _criteria.values():
        terminalreporter.write_line(f"{outcome}  {doc}")
