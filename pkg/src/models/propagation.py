from dataclasses import dataclass, field
from typing import Dict

from errors import StabilityError
from models.envelope import OmegaLaw


@dataclass(frozen=True)
class PotentialSpec:
    """Inverted harmonic potential -w^2(t) (x - center)^2 / 2"""

    law: OmegaLaw = field(default_factory=OmegaLaw.free)
    center: float = 0.0

    def to_dict(self) -> Dict:
        return {'law': self.law.to_dict(), 'center': self.center}


@dataclass(frozen=True)
class StepPlan:
    dt: float = 2.5e-4
    n_steps: int = 4000
    record_every: int = 20
    absorber_width: float = 0.1
    absorber_strength: float = 40.0

    def __post_init__(self):
        if not self.dt > 0:
            raise StabilityError(f"dt must be positive, got {self.dt}")
        if self.n_steps < 0:
            raise StabilityError(f"n_steps must be non-negative, got {self.n_steps}")
        if self.record_every < 1:
            raise StabilityError(f"record_every must be >= 1, got {self.record_every}")
        if not 0.0 <= self.absorber_width <= 0.25:
            raise StabilityError(f"absorber_width must lie in [0, 0.25], got {self.absorber_width}")
        if self.absorber_strength < 0:
            raise StabilityError(f"absorber_strength must be non-negative, got {self.absorber_strength}")

    @property
    def t_final(self) -> float:
        return self.dt * self.n_steps

    @property
    def absorbing(self) -> bool:
        return self.absorber_width > 0 and self.absorber_strength > 0

    def to_dict(self) -> Dict:
        return {
            'dt': self.dt, 'n_steps': self.n_steps, 'record_every': self.record_every,
            'absorber_width': self.absorber_width, 'absorber_strength': self.absorber_strength,
        }
