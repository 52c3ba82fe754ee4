import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_acceptance_results: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if "test_acceptance" not in str(item.fspath):
        return
    name = item.name.split("[")[0]
    if report.when == "call" or report.outcome == "skipped":
        previous = _acceptance_results.get(name)
        if previous != "failed":
            _acceptance_results[name] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(_acceptance_results, key=_criterion_order):
        outcome = _acceptance_results[name]
        label = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}.get(
            outcome, outcome.upper()
        )
        terminalreporter.write_line(f"{_criterion_label(name)}: {label}")


def _criterion_label(test_name: str) -> str:
    # test_p1_density_oracle -> "P1 density oracle"
    parts = test_name.removeprefix("test_").split("_")
    return parts[0].upper() + " " + " ".join(parts[1:])


def _criterion_order(test_name: str):
    parts = test_name.removeprefix("test_").split("_")
    digits = "".join(ch for ch in parts[0] if ch.isdigit())
    return (int(digits) if digits else 99, test_name)
