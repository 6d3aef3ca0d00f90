"""Exception hierarchy shared by the lattice, physics and CLI layers."""
from typing import Any, Iterable, Optional


class QLAError(Exception):
    """Base class for every error raised by qla2d."""


class GeometryError(QLAError, ValueError):
    """Invalid lattice shape or field layout."""


class DielectricError(QLAError, ValueError):
    """Invalid refractive-index data or interface layout."""


class PulseError(QLAError, ValueError):
    """Pulse parameters that cannot be realized on the lattice."""


class DecompositionError(QLAError, ValueError):
    """Matrix that does not have the potential-operator structure."""


class EvanescentError(QLAError, ValueError):
    """Fresnel coefficients requested beyond the critical angle."""


class ScheduleError(QLAError, ValueError):
    """Invalid timestep schedule or run parameters."""


class DiagnosticError(QLAError, ValueError):
    """A diagnostic that is undefined for the given field (e.g. zero energy)."""


class ConfigError(QLAError, ValueError):
    """Run configuration rejected; carries every validation message."""

    def __init__(self, errors: Iterable[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors) if self.errors else "invalid configuration")


class SimulationError(QLAError, RuntimeError):
    """Failure while advancing the field."""


class RunAborted(SimulationError):
    """A run stopped early. ``state`` holds the field as it was when the run stopped."""

    def __init__(self, message: str, state: Optional[Any] = None):
        super().__init__(message)
        self.state = state


class ArtifactError(QLAError):
    """Reading or writing a run artifact failed."""
