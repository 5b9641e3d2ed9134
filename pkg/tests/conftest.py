import numpy as np
import pytest

from condsep import SubsystemDims, validate_density

BELL = np.zeros((4, 4), dtype=complex)
for _i in (0, 3):
    for _j in (0, 3):
        BELL[_i, _j] = 0.5

XY22 = SubsystemDims(("x", "y"), (2, 2))


@pytest.fixture
def bell_rho():
    return validate_density(BELL, XY22)


def werner(p: float) -> np.ndarray:
    return p * BELL + (1.0 - p) * np.eye(4) / 4.0


@pytest.fixture
def werner_rho():
    def _make(p):
        return validate_density(werner(p), XY22)

    return _make
