import pytest

from ctunnel.potential import default_seal, figure, quartic, seal

# One line per acceptance criterion, filled in by test_acceptance.py and
# printed at the end of the session so the verdicts survive output capture.
ACCEPTANCE_LINES = {}


def record(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def quartic_spec():
    return quartic()


@pytest.fixture(scope="session")
def figure_spec():
    return figure()


@pytest.fixture(scope="session")
def sealed_quartic(quartic_spec):
    return default_seal(quartic_spec)


@pytest.fixture(scope="session")
def clean_sealed_quartic(quartic_spec):
    """Wider and taller seal whose spectrum in D(0, 7h) is free of seal states at h = 0.1."""
    return seal(quartic_spec, "right", 0.75, 10.0)
