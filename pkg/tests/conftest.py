import numpy as np
import pytest

from shadow_orbits.zeta import sl3_level1_census


@pytest.fixture(scope="session")
def census5():
    return sl3_level1_census(5, threads=1, scaling_classes=False)


def e(n, i, j):
    m = np.zeros((n, n), dtype=np.int64)
    m[i, j] = 1
    return m
