import functools

import pytest

from cfinsler import SamplePlan, TangentSample, classify, zoo
from cfinsler.metric import plan_samples

DEFAULT_PLAN = SamplePlan()

# shared generic point: z = (0.3+0.1i, -0.2+0.25i), eta = (0.7+0.2i, 0.4-0.3i)
Z0 = (0.3 + 0.1j, -0.2 + 0.25j)
ETA0 = (0.7 + 0.2j, 0.4 - 0.3j)


@pytest.fixture(scope="session")
def point():
    return TangentSample(Z0, ETA0)


@functools.lru_cache(maxsize=None)
def zoo_spec(id):
    return zoo.make(id)


@functools.lru_cache(maxsize=None)
def zoo_samples(id):
    return plan_samples(zoo_spec(id), DEFAULT_PLAN)


@functools.lru_cache(maxsize=None)
def zoo_report(id):
    return classify(zoo_spec(id), zoo_samples(id))


@pytest.fixture(scope="session")
def report_for():
    return zoo_report


@pytest.fixture(scope="session")
def spec_for():
    return zoo_spec


@pytest.fixture(scope="session")
def samples_for():
    return zoo_samples


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", None) != "call" or "test_acceptance.py" not in rep.nodeid:
                continue
            name = rep.nodeid.split("::")[-1]
            if not name.startswith("test_criterion_"):
                continue
            number = int(name.split("_")[2])
            detail = dict(rep.user_properties).get("detail", "")
            lines.append((number, f"criterion {number:2d}: {'PASS' if outcome == 'passed' else 'FAIL'}  {detail}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
