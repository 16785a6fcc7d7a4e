import numpy as np
import pytest

from polyploid.core import make_rng


@pytest.fixture
def rng():
    return make_rng(12345)


def brute_dominates(a, b):
    """Direct definition, written independently of polyploid.core."""
    no_worse = all(x <= y for x, y in zip(a, b))
    better = any(x < y for x, y in zip(a, b))
    return no_worse and better


def brute_counts(objs):
    return [sum(brute_dominates(objs[j], objs[i]) for j in range(len(objs)) if j != i)
            for i in range(len(objs))]


def random_objectives(gen: np.random.Generator, n: int, m: int, discrete: bool = False):
    if discrete:
        # small integer grid so ties and duplicates actually occur
        return gen.integers(0, 4, size=(n, m)).astype(float)
    return gen.random((n, m))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
