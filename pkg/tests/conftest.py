import numpy as np
import pytest

from models.grid import GridSpec, GridWave
from models.trajectory import TrajectoryRecord
from services import wavefield


@pytest.fixture
def shifted_grid():
    """Grid used by the shifted-potential scenarios; x = 17 and x = 12 are nodes"""
    return GridSpec(-20.0, 44.0, 2048)


@pytest.fixture
def small_grid():
    return GridSpec(-20.0, 20.0, 512)


@pytest.fixture
def gaussian_at_17(shifted_grid):
    return wavefield.build_gaussian(shifted_grid, 17.0, 10.0)


@pytest.fixture
def make_wave():
    def _make(grid: GridSpec, values) -> GridWave:
        return GridWave(grid, np.asarray(values, dtype=np.complex128))
    return _make


@pytest.fixture
def make_record():
    def _make(times, lobe=None, mean=None, env_xc=None) -> TrajectoryRecord:
        times = list(times)
        size = len(times)
        return TrajectoryRecord(
            times=times,
            norm=[1.0] * size,
            mean_x=list(mean) if mean is not None else [0.0] * size,
            lobe_x=list(lobe) if lobe is not None else [0.0] * size,
            width=[1.0] * size,
            env_L=[1.0] * size if env_xc is not None else None,
            env_xc=list(env_xc) if env_xc is not None else None,
        )
    return _make
