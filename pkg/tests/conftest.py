import pytest

from mmrelay.scenario import ScenarioConfig

_CRITERIA: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def default_cfg():
    return ScenarioConfig()


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's verdict for the end-of-run summary."""

    def record(key: str, ok: bool, detail: str) -> None:
        _CRITERIA[key] = (bool(ok), detail)
        assert ok, f"{key}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=lambda k: int(k[2:])):
        ok, detail = _CRITERIA[key]
        terminalreporter.write_line(f"{key:>5s} {'PASS' if ok else 'FAIL'}  {detail}")
