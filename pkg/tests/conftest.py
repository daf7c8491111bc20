import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from cstar_hodge import AlgebraElement, AlgebraShape, ModuleSpace  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def E(n, i, j, shape=None):
    """Matrix unit ``E_ij`` (1-based) in ``M_n``, as an element of ``shape``."""
    shape = shape or AlgebraShape([n])
    m = np.zeros((n, n))
    m[i - 1, j - 1] = 1
    return AlgebraElement(shape, [m])


def scalars(shape, *values):
    return AlgebraElement(shape, [np.array([[v]]) for v in values])


shapes = st.lists(st.integers(1, 3), min_size=1, max_size=3).map(AlgebraShape)
seeds = st.integers(0, 2**32 - 1)


@st.composite
def spaces(draw, max_rank=4):
    return ModuleSpace(draw(shapes), draw(st.integers(0, max_rank)))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
