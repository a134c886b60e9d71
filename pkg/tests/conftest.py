import re

import pytest


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def acceptance_log(request):
    return request.config._acceptance_lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if not lines:
        return
    parts = {}
    for line in lines:
        m = re.match(r"criterion (\d+): (PASS|FAIL) (.*?) \| (.*)", line)
        parts.setdefault(int(m.group(1)), (m.group(3), []))[1].append((m.group(2), m.group(4)))
    terminalreporter.section("acceptance criteria")
    for n in sorted(parts):
        title, items = parts[n]
        ok = all(v == "PASS" for v, _ in items)
        detail = items[0][1] if len(items) == 1 else "; ".join(f"{t} ({v})" for v, t in items)
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}: {detail}")
