"""Collects one verdict line per acceptance criterion for the terminal summary."""

from contextlib import contextmanager

RESULTS = {}


@contextmanager
def criterion(number, title):
    try:
        yield
    except BaseException:
        RESULTS[number] = f"criterion {number:2d} FAIL  {title}"
        print(RESULTS[number])
        raise
    RESULTS[number] = f"criterion {number:2d} PASS  {title}"
    print(RESULTS[number])
