import pytest

ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; shown in the terminal summary even when output is captured."""
    lines = request.config.stash[ACCEPTANCE_KEY]

    def record(n, ok, detail):
        line = f"[criterion {n:>2}] {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append(line)
        print("\n" + line)
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
