import re

import pytest

GAME_RESULT_SCHEMA = {
    "type": "object",
    "required": ["game", "params", "trials", "successes", "estimate", "std_error", "exact", "bound", "seed"],
    "additionalProperties": False,
    "properties": {
        "game": {"type": "string"},
        "params": {
            "type": "object",
            "required": ["n", "k", "m", "gamma"],
            "properties": {
                "n": {"type": "integer"},
                "k": {"type": "integer"},
                "m": {"type": "integer"},
                "gamma": {"type": "number"},
            },
        },
        "trials": {"type": "integer"},
        "successes": {"type": "integer"},
        "estimate": {"type": "number"},
        "std_error": {"type": "number"},
        "exact": {"anyOf": [{"type": "null"}, {"type": "string", "pattern": r"^-?\d+/\d+$"}]},
        "bound": {"type": "number"},
        "seed": {"type": "string"},
    },
}


_ACCEPTANCE: dict[int, tuple[str, str]] = {}
_NAME = re.compile(r"test_criterion_(\d+)_(\w+)")


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    m = _NAME.search(report.nodeid)
    if not m:
        return
    num, label = int(m.group(1)), m.group(2).replace("_", " ")
    if report.when == "call" or report.outcome != "passed":
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        prev = _ACCEPTANCE.get(num)
        if prev is None or prev[1] == "PASS":
            _ACCEPTANCE[num] = (label, status)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        label, status = _ACCEPTANCE[num]
        terminalreporter.write_line(f"[{status}] criterion {num:2d}: {label}")


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(12345)


@pytest.fixture
def game_result_schema():
    return GAME_RESULT_SCHEMA
