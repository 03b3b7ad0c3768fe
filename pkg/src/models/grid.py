from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from errors import GridError, GridMismatchError


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid x_j = x_min + j*dx, dx = (x_max - x_min)/n"""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise GridError(f"x_max ({self.x_max}) must exceed x_min ({self.x_min})")
        if self.n < 256 or self.n & (self.n - 1):
            raise GridError(f"n must be a power of two >= 256, got {self.n}")

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    def index_of(self, position: float) -> int:
        return int(round((position - self.x_min) / self.dx))

    def to_dict(self) -> Dict:
        return {'x_min': self.x_min, 'x_max': self.x_max, 'n': self.n}


@dataclass(frozen=True)
class GridWave:
    """Complex wave function sampled on a GridSpec; amplitudes are read-only"""

    grid: GridSpec
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.amplitudes, dtype=np.complex128)
        if values.shape != (self.grid.n,):
            raise GridError(f"expected {self.grid.n} amplitudes, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise GridError("wave amplitudes contain NaN or Inf")
        values.flags.writeable = False
        object.__setattr__(self, 'amplitudes', values)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sum(self.density) * self.grid.dx)

    def with_amplitudes(self, amplitudes: np.ndarray) -> 'GridWave':
        return GridWave(self.grid, amplitudes)

    def require_same_grid(self, other: 'GridWave'):
        if self.grid != other.grid:
            raise GridMismatchError(f"grids differ: {self.grid} vs {other.grid}")
