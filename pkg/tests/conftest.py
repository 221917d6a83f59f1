import numpy as np
import pytest

from dbmfoil import morph
from dbmfoil.geometry import CollocationGrid


def brute_force_crossings(y, x):
    """Count proper crossings between non-adjacent segments of the closed contour.

    O(n^2) orientation test; touching at a vertex or collinear overlap is
    not a proper crossing.
    """
    p = np.column_stack([x, y])
    a = p
    b = np.roll(p, -1, axis=0)  # last segment closes the trailing edge
    n = len(p)

    def orient(p0, p1, q):
        return np.sign((p1[..., 0] - p0[..., 0]) * (q[..., 1] - p0[..., 1])
                       - (p1[..., 1] - p0[..., 1]) * (q[..., 0] - p0[..., 0]))

    A, B = a[:, None, :], b[:, None, :]
    C, D = a[None, :, :], b[None, :, :]
    o1, o2 = orient(A, B, C), orient(A, B, D)
    o3, o4 = orient(C, D, A), orient(C, D, B)
    proper = (o1 * o2 < 0) & (o3 * o4 < 0)
    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1))  # first and closing segments share point 0
    return int(np.sum(proper[i[keep], j[keep]]))


@pytest.fixture(scope="session")
def grid400():
    return CollocationGrid(400)


@pytest.fixture(scope="session")
def baselines400(grid400):
    return morph.builtin_baselines(grid400)


@pytest.fixture(scope="session")
def sample400(grid400):
    return morph.builtin_sample(grid400)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
