import numpy as np
import pytest

from usflab.rng import stream


@pytest.fixture
def rng(request):
    # one independent stream per test, keyed by the test name
    key = sum(ord(c) * 31**i for i, c in enumerate(request.node.name)) % 2**31
    return stream(2024, key)


def within_se(estimate, se, target, k=4.0):
    return abs(estimate - target) <= k * se + 1e-12


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
