"""Spectral laboratory for helicity-type invariants of ideal MHD and Euler flow."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BlowupError,
    ConfigError,
    DegreeError,
    HierarchyOrderError,
    NonPositiveDensityError,
    PressureSolveError,
)
from .fieldcalc import Grid, KForm, ParticleSet  # noqa: E402

__all__ = [
    "BlowupError",
    "ConfigError",
    "DegreeError",
    "Grid",
    "HierarchyOrderError",
    "KForm",
    "NonPositiveDensityError",
    "ParticleSet",
    "PressureSolveError",
    "__version__",
]
