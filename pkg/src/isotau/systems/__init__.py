"""The six Painleve isomonodromic systems behind one interface.

``get_system("P2")`` returns the system object; the module-level functions
accept a kind tag, a :class:`SystemSpec` or a system object.
"""
from __future__ import annotations

from .base import (
    GUARD,
    PAIRED_THETA,
    SIGMA3,
    STATE_SLOTS,
    THETA_SLOTS,
    DensityBreakdown,
    ExtendedState,
    LocalFrame,
    PainleveKind,
    PainleveSystem,
    PviResidueParams,
    SystemSpec,
    ThetaParams,
)
from .p1 import P1System
from .p2 import P2System
from .p3 import P3System
from .p4 import P4System
from .p5 import P5System
from .p6 import P6System

_REGISTRY = {
    PainleveKind.P1: P1System(),
    PainleveKind.P2: P2System(),
    PainleveKind.P3: P3System(),
    PainleveKind.P4: P4System(),
    PainleveKind.P5: P5System(),
    PainleveKind.P6: P6System(),
}

KINDS = tuple(PainleveKind)


def get_system(kind) -> PainleveSystem:
    if isinstance(kind, PainleveSystem):
        return kind
    if isinstance(kind, SystemSpec):
        kind = kind.kind
    try:
        return _REGISTRY[PainleveKind(kind)]
    except ValueError:
        raise ValueError(f"unknown Painleve kind {kind!r}") from None


def system_spec(kind) -> SystemSpec:
    return get_system(kind).spec


def hamiltonian(spec, theta, state, t):
    return get_system(spec).hamiltonian(theta, state, t)


def vector_field(spec, theta, state, t):
    return get_system(spec).vector_field(theta, state, t)


def density_breakdown(spec, theta, state, t):
    return get_system(spec).density_breakdown(theta, state, t)


def a_matrix(spec, theta, state, t, z):
    return get_system(spec).a_matrix(theta, state, t)(z)


def b_matrix(spec, theta, state, t, z):
    return get_system(spec).b_matrix(theta, state, t)(z)


def local_frames(spec, theta, state, t, order=None):
    return get_system(spec).local_frames(theta, state, t, order)


def painleve_residual(spec, theta, q, q_dot, q_ddot, t):
    return get_system(spec).painleve_residual(theta, q, q_dot, q_ddot, t)


__all__ = [
    "GUARD", "PAIRED_THETA", "SIGMA3", "STATE_SLOTS", "THETA_SLOTS", "KINDS",
    "DensityBreakdown", "ExtendedState", "LocalFrame", "PainleveKind", "PainleveSystem",
    "PviResidueParams", "SystemSpec", "ThetaParams",
    "get_system", "system_spec", "hamiltonian", "vector_field", "density_breakdown",
    "a_matrix", "b_matrix", "local_frames", "painleve_residual",
]
