"""Acceptance run: every criterion at its stated settings and tolerance.

Runs under pytest (one test per criterion, with a summary line each printed
at the end of the session) or directly with ``python tests/test_acceptance.py``.
Threads default to 8; set USF_LAB_THREADS to change that.  Results do not
depend on the thread count.
"""

import os
import sys
import time

import pytest

from usflab.experiments import CRITERIA, run_criterion

SEED = 7
THREADS = int(os.environ.get("USF_LAB_THREADS", "8"))
RESULTS: dict = {}


def describe(number, outcome, seconds):
    name = CRITERIA[number][0]
    verdict = "PASS" if outcome.passed else "FAIL"
    line = f"criterion {number:2d} [{name}] {verdict}  ({len(outcome.checks)} checks, {seconds:.1f}s)"
    failed = [c for c in outcome.checks if not c.passed]
    return line + "".join(f"\n    failed: {c.name}  [{c.detail}]" for c in failed)


@pytest.mark.acceptance
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    start = time.perf_counter()
    outcome = run_criterion(number, seed=SEED, threads=THREADS)
    line = describe(number, outcome, time.perf_counter() - start)
    RESULTS[number] = line
    print(line)
    assert outcome.passed, line


if __name__ == "__main__":
    ok = True
    for n in sorted(CRITERIA):
        t = time.perf_counter()
        o = run_criterion(n, seed=SEED, threads=THREADS)
        print(describe(n, o, time.perf_counter() - t), flush=True)
        ok &= o.passed
    sys.exit(0 if ok else 1)
