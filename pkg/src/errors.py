"""Exception hierarchy shared by the numerical services and the CLI."""


class SimulationError(Exception):
    """Base class for every error raised by the simulator"""


class PoleError(SimulationError):
    """Kummer series requested at a pole of its denominator parameter"""


class ConvergenceError(SimulationError):
    """A series or adaptive stepper failed to converge"""


class DomainError(SimulationError):
    """Argument outside the region where an evaluation is defined"""


class BlowupError(SimulationError):
    """Envelope or wave norm left its admissible range"""


class GridError(SimulationError):
    """Time or space samples unsuitable for a finite-difference diagnostic"""


class GridMismatchError(SimulationError):
    """Two waves live on different grids"""


class DegenerateError(SimulationError):
    """Norm vanished where a normalisation is required"""


class StabilityError(SimulationError):
    """Split-step time step violates the stability or aliasing guard"""


class BoundaryError(SimulationError):
    """Main lobe located inside the absorbing zone"""


class MissingDataError(SimulationError):
    """A trajectory record lacks an optional series a diagnostic needs"""


class ConfigError(SimulationError):
    """Invalid scenario configuration"""


class StorageError(SimulationError):
    """Writing an artifact to disk failed"""
