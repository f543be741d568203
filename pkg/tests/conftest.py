import pytest

_RESULTS = pytest.StashKey[dict]()
CRITERIA = range(1, 11)


@pytest.fixture
def criterion(request):
    """Record one check of an acceptance criterion; returns its outcome."""
    results = request.config.stash.setdefault(_RESULTS, {})

    def record(n: int, ok: bool, detail: str = "") -> bool:
        results.setdefault(n, []).append((bool(ok), detail))
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS, None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in CRITERIA:
        checks = results.get(n)
        if not checks:
            terminalreporter.write_line(f"criterion {n:2d}: FAIL  not run")
            continue
        ok = all(c for c, _ in checks)
        detail = "; ".join(d for _, d in checks if d)
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
