from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Tuple, Union

import numpy as np

from errors import DomainError

ArrayLike = Union[float, np.ndarray]


class LawKind(str, Enum):
    FREE = 'free'
    CONSTANT = 'constant'
    BREATHING = 'breathing'
    TABULATED = 'tabulated'


@dataclass(frozen=True)
class OmegaLaw:
    """Time dependence of omega^2(t) in the inverted harmonic potential"""

    kind: LawKind = LawKind.FREE
    omega_sq_const: float = 0.0
    eps: float = 0.0
    omega0: float = 0.0
    times: Tuple[float, ...] = field(default=())
    values: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, 'kind', LawKind(self.kind))
        if self.kind is LawKind.BREATHING and not abs(self.eps) < 1:
            raise DomainError(f"breathing law needs |eps| < 1, got {self.eps}")
        if self.kind is LawKind.TABULATED:
            times = tuple(float(t) for t in self.times)
            values = tuple(float(v) for v in self.values)
            if len(times) < 2 or len(times) != len(values):
                raise DomainError("tabulated law needs >= 2 times and as many values")
            if np.any(np.diff(times) <= 0):
                raise DomainError("tabulated times must be strictly increasing")
            object.__setattr__(self, 'times', times)
            object.__setattr__(self, 'values', values)

    @classmethod
    def free(cls) -> 'OmegaLaw':
        return cls(LawKind.FREE)

    @classmethod
    def constant(cls, omega_sq: float) -> 'OmegaLaw':
        return cls(LawKind.CONSTANT, omega_sq_const=float(omega_sq))

    @classmethod
    def breathing(cls, eps: float, omega0: float) -> 'OmegaLaw':
        return cls(LawKind.BREATHING, eps=float(eps), omega0=float(omega0))

    @classmethod
    def tabulated(cls, times, values) -> 'OmegaLaw':
        return cls(LawKind.TABULATED, times=tuple(times), values=tuple(values))

    def omega_sq(self, t: ArrayLike) -> ArrayLike:
        if self.kind is LawKind.FREE:
            return np.zeros_like(t, dtype=float) if np.ndim(t) else 0.0
        if self.kind is LawKind.CONSTANT:
            return np.full_like(t, self.omega_sq_const, dtype=float) if np.ndim(t) else self.omega_sq_const
        if self.kind is LawKind.BREATHING:
            # L = 1 + eps*sin(omega0 t) substituted into L'' - w^2 L = -omega0^2/L^3
            s = np.sin(self.omega0 * t)
            scale = 1.0 + self.eps * s
            return self.omega0 ** 2 / scale ** 4 - self.eps * self.omega0 ** 2 * s / scale
        # linear interpolation, held constant outside the table
        return np.interp(t, self.times, self.values)

    def max_abs_omega_sq(self, t_start: float, t_end: float) -> float:
        if self.kind is LawKind.FREE:
            return 0.0
        if self.kind is LawKind.CONSTANT:
            return abs(self.omega_sq_const)
        samples = np.linspace(t_start, t_end, 2049)
        return float(np.max(np.abs(self.omega_sq(samples))))

    def to_dict(self) -> Dict:
        data = {'kind': self.kind.value}
        if self.kind is LawKind.CONSTANT:
            data['omega_sq'] = self.omega_sq_const
        elif self.kind is LawKind.BREATHING:
            data.update(eps=self.eps, omega0=self.omega0)
        elif self.kind is LawKind.TABULATED:
            data.update(times=list(self.times), values=list(self.values))
        return data


@dataclass(frozen=True)
class EnvelopeState:
    """Instantaneous envelope (L, L', x_c, x_c', S, Theta) of the exact wave"""

    t: float = 0.0
    L: float = 1.0
    Ldot: float = 0.0
    xc: float = 0.0
    xcdot: float = 0.0
    S: float = 0.0
    Theta: float = 0.0

    def as_vector(self) -> np.ndarray:
        return np.array([self.L, self.Ldot, self.xc, self.xcdot, self.S, self.Theta])

    @classmethod
    def from_vector(cls, t: float, y: np.ndarray) -> 'EnvelopeState':
        return cls(float(t), *(float(v) for v in y))

    def at_time(self, t: float) -> 'EnvelopeState':
        return replace(self, t=float(t))

    def to_dict(self) -> Dict:
        return {
            't': self.t, 'L': self.L, 'Ldot': self.Ldot, 'xc': self.xc,
            'xcdot': self.xcdot, 'S': self.S, 'Theta': self.Theta,
        }
