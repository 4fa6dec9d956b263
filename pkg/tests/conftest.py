import pytest
from hypothesis import HealthCheck, settings

from sl3tilt import characters

settings.register_profile("repo", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture(autouse=True)
def _no_disk_cache():
    characters.configure_cache(False)
    yield
    characters.configure_cache(False)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        verdict, title = RESULTS[n]
        terminalreporter.write_line(f"{verdict} criterion {n}: {title}")
