import math
import sys
import time
from types import SimpleNamespace

import numpy as np
import pytest

from physact.data import generate

NU = 0.51
DOMAIN = (0.0, 4 * math.pi)


@pytest.fixture
def paper_data():
    return generate(0.51, 0.50001, 11, 0.2, DOMAIN, seed=0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def seed_sweep():
    """Default experiment trained for all three variants over seeds 0..9.

    Shared because it is the expensive part of the suite; ``elapsed`` is the
    wall-clock time of the sweep in seconds.
    """
    from physact.experiment import seed_sweep as sweep

    t0 = time.perf_counter()
    runs = sweep(range(10))
    return SimpleNamespace(runs=runs, elapsed=time.perf_counter() - t0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = sorted(getattr(mod, "RESULTS", []), key=lambda l: int(l.split("criterion ")[1].split(":")[0]))
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
