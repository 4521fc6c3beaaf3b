import time

import pytest
from hypothesis import settings


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call":
        item.call_report = report


@pytest.fixture
def criterion(request):
    """Print one PASS/FAIL line for an acceptance criterion after the test body."""
    record = {"label": None, "detail": "", "start": time.perf_counter()}
    yield record
    if record["label"] is None:
        return
    report = getattr(request.node, "call_report", None)
    verdict = "PASS" if report is not None and report.passed else "FAIL"
    elapsed = time.perf_counter() - record["start"]
    capman = request.config.pluginmanager.getplugin("capturemanager")
    with capman.global_and_fixture_disabled():
        print(f"\n{verdict} {record['label']} ({elapsed:.2f}s) {record['detail']}".rstrip())


settings.register_profile("default", deadline=None)
settings.load_profile("default")
