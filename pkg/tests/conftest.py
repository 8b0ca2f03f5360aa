import importlib.util
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

HERE = Path(__file__).parent


def pysat_command():
    if importlib.util.find_spec("pysat") is None:
        return None
    return f"{sys.executable} {HERE / 'pysat_solver.py'}"


@pytest.fixture
def sat_solver():
    cmd = pysat_command()
    if cmd is None:
        pytest.skip("python-sat not installed")
    return cmd


# one line per acceptance criterion in the terminal summary
_criteria: dict[int, tuple[str, str, float]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when != "call":
        return
    number, title = mark.args
    _criteria[number] = ("PASS" if rep.passed else "FAIL", title, rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, title, seconds = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {title}  ({seconds:.2f} s)")
