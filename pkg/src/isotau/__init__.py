"""Isomonodromic Painleve and Schlesinger systems: integration of tau functions and
classical actions along complex-time paths, with numerical certification of the
identities relating them."""

from .algebra import INFINITY, ExponentData, MatrixSeries, RationalMatrix
from .errors import (
    ConfigError,
    GuardError,
    IntegrationAbort,
    IsotauError,
    OrderError,
    SeriesError,
    SingularMatrixError,
)
from .systems import (
    DensityBreakdown,
    ExtendedState,
    LocalFrame,
    PainleveKind,
    SystemSpec,
    ThetaParams,
    get_system,
)

__version__ = "0.1.0"

__all__ = [
    "INFINITY",
    "ExponentData",
    "MatrixSeries",
    "RationalMatrix",
    "ConfigError",
    "GuardError",
    "IntegrationAbort",
    "IsotauError",
    "OrderError",
    "SeriesError",
    "SingularMatrixError",
    "DensityBreakdown",
    "ExtendedState",
    "LocalFrame",
    "PainleveKind",
    "SystemSpec",
    "ThetaParams",
    "get_system",
]
