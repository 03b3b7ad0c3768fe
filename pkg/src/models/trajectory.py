from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from errors import GridError

SERIES = ('times', 'norm', 'mean_x', 'lobe_x', 'width')
OPTIONAL_SERIES = ('env_L', 'env_xc')


@dataclass
class TrajectoryRecord:
    """Diagnostics sampled at every recorded snapshot of an evolution"""

    times: List[float] = field(default_factory=list)
    norm: List[float] = field(default_factory=list)
    mean_x: List[float] = field(default_factory=list)
    lobe_x: List[float] = field(default_factory=list)
    width: List[float] = field(default_factory=list)
    env_L: Optional[List[float]] = None
    env_xc: Optional[List[float]] = None

    def __post_init__(self):
        size = len(self.times)
        for name in SERIES + OPTIONAL_SERIES:
            values = getattr(self, name)
            if values is None:
                continue
            values = [float(v) for v in values]
            if len(values) != size:
                raise GridError(f"series '{name}' has {len(values)} entries, expected {size}")
            setattr(self, name, values)
        if any(not 0.0 < v <= 1.01 for v in self.norm):
            raise GridError("norm entries must lie in (0, 1.01]")

    def __len__(self) -> int:
        return len(self.times)

    def array(self, name: str) -> np.ndarray:
        values = getattr(self, name)
        return np.asarray(values if values is not None else [], dtype=float)

    @property
    def dt(self) -> float:
        """Uniform sample spacing; GridError when spacing is not uniform"""
        t = self.array('times')
        if t.size < 2:
            raise GridError("need at least two samples for a time step")
        steps = np.diff(t)
        if np.max(np.abs(steps - steps[0])) > 1e-9 * max(1.0, abs(steps[0])):
            raise GridError("time samples are not uniformly spaced")
        return float(steps[0])

    def to_dict(self) -> Dict:
        return {name: getattr(self, name) for name in SERIES + OPTIONAL_SERIES}
