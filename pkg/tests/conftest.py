import pytest

from hirzebruch.formal import VertexOracle


@pytest.fixture(scope="session")
def formal_oracle():
    return VertexOracle("formal")


@pytest.fixture(scope="session")
def builtin_oracle():
    return VertexOracle("builtin")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion, after the normal summary."""
    lines = []
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            if "test_acceptance" not in rep.nodeid:
                continue
            name = rep.nodeid.split("::")[-1]
            verdict = "PASS" if status == "passed" else "FAIL"
            lines.append((name, verdict))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict in sorted(lines):
        terminalreporter.write_line(f"{verdict} {name}")
