import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.register_profile("thorough", parent=settings.get_profile("default"), max_examples=500)
settings.load_profile("default")

_CRITERIA: list[str] = []


@pytest.fixture
def criterion():
    """Record one pass/fail line for an acceptance criterion.

    Use as ``with criterion(3, "description") as note:``; ``note`` collects
    measurements printed after the verdict.
    """

    class _Recorder:
        def __init__(self, number, title):
            self.number, self.title, self.notes = number, title, []

        def __call__(self, text):
            self.notes.append(str(text))

        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            verdict = "PASS" if exc_type is None else "FAIL"
            extra = f" ({'; '.join(self.notes)})" if self.notes else ""
            line = f"{verdict} criterion {self.number}: {self.title}{extra}"
            _CRITERIA.append(line)
            print(line)
            return False

    return _Recorder


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
