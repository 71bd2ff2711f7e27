import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "crossfield",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("crossfield")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: runs longer than a few seconds")


@pytest.fixture(scope="session")
def contour():
    from crossfield.resolvent_kernel import DEFAULT_CONTOUR

    return DEFAULT_CONTOUR


_CRITERIA = {}


@pytest.fixture(scope="session")
def record_criterion():
    """Store the verdict of an acceptance criterion for the summary lines."""

    def record(number, passed, detail):
        _CRITERIA[number] = (bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 11):
        passed, detail = _CRITERIA.get(n, (False, "not run or errored before a verdict"))
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
