from dataclasses import dataclass
from typing import Dict

from errors import DomainError


@dataclass(frozen=True)
class BranchParams:
    """Branch index and constants (a0, omega0, E) of one exact solution"""

    n: int = 2
    a0: float = 1.0
    omega0: float = 1.0
    E: float = 0.0

    def __post_init__(self):
        if self.n not in (1, 2):
            raise DomainError(f"branch index must be 1 or 2, got {self.n}")
        if self.omega0 < 0:
            raise DomainError(f"omega0 must be non-negative, got {self.omega0}")

    def to_dict(self) -> Dict:
        return {'n': self.n, 'a0': self.a0, 'omega0': self.omega0, 'E': self.E}
