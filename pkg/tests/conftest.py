import pytest
from hypothesis import settings

# first examples pay for one-off lookup table builds
settings.register_profile("default", deadline=None)
settings.load_profile("default")

_RESULTS: list[tuple[int, bool, str]] = []


@pytest.fixture
def criterion(request):
    """Record one pass/fail line for an acceptance criterion."""

    def record(number: int, label: str):
        return _Recorder(number, label)

    return record


class _Recorder:
    def __init__(self, number, label):
        self.number, self.label = number, label

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        ok = exc_type is None
        line = f"criterion {self.number:2d}: {'PASS' if ok else 'FAIL'}  {self.label}"
        _RESULTS.append((self.number, ok, line))
        print(line)
        return False


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, _, line in sorted(_RESULTS):
        terminalreporter.write_line(line)
