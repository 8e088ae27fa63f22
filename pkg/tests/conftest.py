import sys
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from sftpij.core import AdjacencyMatrix, full_shift  # noqa: E402

settings.register_profile("repo", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("repo")


@st.composite
def matrices(draw, min_size=1, max_size=5):
    """0-1 matrices without empty rows or columns."""
    n = draw(st.integers(min_size, max_size))
    rows = draw(st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=n, max_size=n))
    for i in range(n):
        if not any(rows[i]):
            rows[i][i] = 1
        if not any(rows[j][i] for j in range(n)):
            rows[i][i] = 1
    return AdjacencyMatrix.from_rows(rows)


@st.composite
def uniform_matrices(draw, max_size=5):
    """Constant-degree matrices: row i has ones at sigma(i) + s (mod N) for s in S."""
    n = draw(st.integers(1, max_size))
    offsets = draw(st.sets(st.integers(0, n - 1), min_size=1))
    sigma = draw(st.permutations(range(n)))
    rows = [[int((j - sigma[i]) % n in offsets) for j in range(n)] for i in range(n)]
    return AdjacencyMatrix.from_rows(rows)


TRIANGLE = AdjacencyMatrix.from_rows([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
SQRT2 = AdjacencyMatrix.from_rows([[0, 0, 1, 0], [0, 0, 0, 1], [1, 1, 0, 0], [1, 1, 0, 0]])
GOLDEN = AdjacencyMatrix.from_rows([[1, 1], [1, 0]])
TWO_BLOCK = AdjacencyMatrix.from_rows([[1, 1, 0, 0], [0, 0, 1, 1], [1, 1, 0, 0], [0, 0, 1, 1]],
                                      ["00", "01", "10", "11"])
FULL2 = full_shift(2)


@pytest.fixture
def triangle():
    return TRIANGLE


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
