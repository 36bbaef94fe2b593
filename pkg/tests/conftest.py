import time
from collections import defaultdict

import pytest
from hypothesis import settings

from ewfsim.agents import EvolutionModel, ReasoningRule, contradiction_rate

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

BIG_TRIALS = 120_000
BIG_SEED = 20240601


@pytest.fixture(scope="session")
def unitary_a1_run():
    """A1 under controlled unitary evolution at phases (0, 0), 120k trials."""
    t0 = time.perf_counter()
    rate, counts = contradiction_rate(ReasoningRule.A1, EvolutionModel.unitary(), BIG_TRIALS, BIG_SEED)
    return rate, counts, time.perf_counter() - t0


@pytest.fixture(scope="session")
def collapse_a1_run():
    """A1 under per-trial random phases, 120k trials."""
    t0 = time.perf_counter()
    rate, counts = contradiction_rate(ReasoningRule.A1, EvolutionModel.collapse(), BIG_TRIALS, BIG_SEED + 1)
    return rate, counts, time.perf_counter() - t0


_criteria: dict = {}
_outcomes: dict = defaultdict(list)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    _criteria[number] = title
    if report.when == "call" or report.failed or report.skipped:
        _outcomes[number].append(report.passed and report.when == "call")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        results = _outcomes[number]
        status = "PASS" if results and all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {_criteria[number]} ({len(results)} checks)")
