"""Shared types and the abstract interface of a Painleve isomonodromic system."""
from __future__ import annotations

import cmath
from dataclasses import dataclass, fields, replace
from enum import Enum
from fractions import Fraction

import numpy as np

from ..algebra import INFINITY, ExponentData, MatrixSeries, Point, RationalMatrix, as_matrix, mat_inverse
from ..errors import GuardError, OrderError

GUARD = 1e-8

SIGMA3 = np.diag([1.0 + 0j, -1.0 + 0j])
I2 = np.eye(2, dtype=complex)

STATE_SLOTS = ("q", "p", "log_k", "log_a", "log_b", "log_c")
THETA_SLOTS = ("theta0", "theta1", "theta_t", "theta_inf")
# log-gauge slot -> the constant exponent it is canonically paired with
PAIRED_THETA = {"log_k": "theta_inf", "log_a": "theta0", "log_b": "theta1", "log_c": "theta_t"}


class PainleveKind(str, Enum):
    P1 = "P1"
    P2 = "P2"
    P3 = "P3"
    P4 = "P4"
    P5 = "P5"
    P6 = "P6"


@dataclass(frozen=True)
class ThetaParams:
    """Formal monodromy exponents (P2's single theta lives in ``theta_inf``)."""

    theta0: complex = 0j
    theta1: complex = 0j
    theta_t: complex = 0j
    theta_inf: complex = 0j

    def __post_init__(self):
        for f in fields(self):
            v = complex(getattr(self, f.name))
            if not cmath.isfinite(v):
                raise ValueError(f"{f.name} must be finite")
            object.__setattr__(self, f.name, v)

    def get(self, name: str) -> complex:
        return getattr(self, name)

    def with_(self, **kw) -> "ThetaParams":
        return replace(self, **kw)


@dataclass(frozen=True)
class ExtendedState:
    """Phase point (q, p) plus logarithms of the gauge parameters k, a, b, c."""

    q: complex
    p: complex
    log_k: complex = 0j
    log_a: complex = 0j
    log_b: complex = 0j
    log_c: complex = 0j

    def __post_init__(self):
        for f in fields(self):
            v = complex(getattr(self, f.name))
            if not cmath.isfinite(v):
                raise ValueError(f"state slot {f.name} must be finite")
            object.__setattr__(self, f.name, v)

    def get(self, name: str) -> complex:
        return getattr(self, name)

    def with_(self, **kw) -> "ExtendedState":
        return replace(self, **kw)

    def to_array(self, layout) -> np.ndarray:
        return np.array([getattr(self, s) for s in layout], dtype=complex)

    @classmethod
    def from_array(cls, layout, arr) -> "ExtendedState":
        return cls(**{s: complex(v) for s, v in zip(layout, arr)})

    @property
    def k(self) -> complex:
        return cmath.exp(self.log_k)

    @property
    def a(self) -> complex:
        return cmath.exp(self.log_a)

    @property
    def b(self) -> complex:
        return cmath.exp(self.log_b)

    @property
    def c(self) -> complex:
        return cmath.exp(self.log_c)


@dataclass(frozen=True)
class SystemSpec:
    kind: PainleveKind
    gamma: Fraction
    state_layout: tuple
    param_names: tuple
    singular_times: tuple


@dataclass(frozen=True)
class DensityBreakdown:
    hamiltonian: complex
    tau_correction: complex
    tau_density: complex
    action_density: complex
    g_value: complex

    def __post_init__(self):
        if self.tau_density != self.hamiltonian + self.tau_correction:
            raise AssertionError("tau density must equal H plus its correction")


@dataclass(frozen=True, eq=False)
class LocalFrame:
    """Formal solution data ``G_nu (I + sum g_k zeta^k) exp(Theta(zeta))`` at one point."""

    location: Point
    gauge: np.ndarray
    series_coeffs: tuple
    exponent: ExponentData

    def __post_init__(self):
        g = as_matrix(self.gauge)
        mat_inverse(g)
        object.__setattr__(self, "gauge", g)
        if self.location is not INFINITY:
            object.__setattr__(self, "location", complex(self.location))
        object.__setattr__(self, "series_coeffs", tuple(as_matrix(m) for m in self.series_coeffs))

    @property
    def order(self) -> int:
        return len(self.series_coeffs)

    def g_series(self, pad: int = 0) -> MatrixSeries:
        """``I + g_1 zeta + ... + g_K zeta^K`` (plus ``pad`` zero coefficients)."""
        d = self.gauge.shape[0]
        c = [np.eye(d, dtype=complex), *self.series_coeffs] + [np.zeros((d, d), dtype=complex)] * pad
        return MatrixSeries(self.location, 0, np.array(c))


@dataclass(frozen=True)
class PviResidueParams:
    """Parametrization of the P6 residues ``A_nu = [[x+th, -u x], [(x+2th)/u, -x-th]]``."""

    x0: complex
    x1: complex
    xt: complex
    u: complex
    v: complex
    w: complex
    k: complex

    def constraint_residuals(self, theta: ThetaParams, q: complex, t: complex) -> dict:
        th0, th1, tht, thi = theta.theta0, theta.theta1, theta.theta_t, theta.theta_inf
        return {
            "e1": self.x0 + th0 + self.x1 + th1 + self.xt + tht + thi,
            "e2": self.u * self.x0 + self.v * self.x1 + self.w * self.xt,
            "e3": (self.x0 + 2 * th0) / self.u + (self.x1 + 2 * th1) / self.v + (self.xt + 2 * tht) / self.w,
            "e4": self.u * self.x0 * t - self.k * q,
        }

    def check(self, theta: ThetaParams, q: complex, t: complex, rtol: float = 1e-10):
        scales = {
            "e1": 1 + abs(self.x0) + abs(self.x1) + abs(self.xt) + abs(theta.theta_inf),
            "e2": 1 + abs(self.u * self.x0) + abs(self.v * self.x1) + abs(self.w * self.xt),
            "e3": 1 + abs((self.x0 + 2 * theta.theta0) / self.u) + abs((self.x1 + 2 * theta.theta1) / self.v)
            + abs((self.xt + 2 * theta.theta_t) / self.w),
            "e4": 1 + abs(self.k * q),
        }
        for name, r in self.constraint_residuals(theta, q, t).items():
            if abs(r) > rtol * scales[name]:
                raise GuardError(f"P6 residue constraint {name} violated: |{r:.3e}|")


def guard(**denoms):
    """Raise GuardError if any named denominator is smaller than the guard radius."""
    for name, v in denoms.items():
        if abs(v) < GUARD:
            raise GuardError(f"denominator {name} = {v!r} within {GUARD:g} of zero")


def diag_power(x_log: complex, s: float) -> np.ndarray:
    """``exp(x_log)**(s sigma3)`` computed from the logarithm."""
    return np.diag([cmath.exp(s * x_log), cmath.exp(-s * x_log)])


class PainleveSystem:
    """Uniform interface; subclasses supply the per-equation formulas.

    Public methods run the guards and delegate to underscored formula methods.
    """

    spec: SystemSpec
    max_order: int = 0

    @property
    def kind(self) -> PainleveKind:
        return self.spec.kind

    @property
    def layout(self) -> tuple:
        return self.spec.state_layout

    @property
    def gamma(self) -> Fraction:
        return self.spec.gamma

    def singular_times(self, theta: ThetaParams | None = None) -> tuple:
        return self.spec.singular_times

    # hooks -------------------------------------------------------------
    def _denominators(self, theta, st, t) -> dict:
        return {}

    def _H(self, theta, st, t):
        raise NotImplementedError

    def _vf(self, theta, st, t) -> dict:
        raise NotImplementedError

    def _tau_correction(self, theta, st, t, H):
        return 0j

    def _G(self, theta, st, t, H):
        raise NotImplementedError

    def _A(self, theta, st, t) -> RationalMatrix:
        raise NotImplementedError

    def _B(self, theta, st, t) -> RationalMatrix:
        raise NotImplementedError

    def _frames(self, theta, st, t) -> list:
        raise NotImplementedError

    def scalar_coefficients(self, theta: ThetaParams) -> dict:
        return {}

    def _scalar_rhs(self, theta, q, qd, t):
        raise NotImplementedError

    def _scalar_denominators(self, q, t) -> dict:
        return {}

    # public API --------------------------------------------------------
    def check_time(self, t):
        for s in self.spec.singular_times:
            if abs(t - s) < GUARD:
                raise GuardError(f"t = {t!r} is a singular time of {self.kind.value}")

    def check(self, theta: ThetaParams, state: ExtendedState, t: complex):
        t = complex(t)
        self.check_time(t)
        guard(**self._denominators(theta, state, t))

    def hamiltonian(self, theta: ThetaParams, state: ExtendedState, t: complex) -> complex:
        self.check(theta, state, t)
        return complex(self._H(theta, state, complex(t)))

    def vector_field(self, theta: ThetaParams, state: ExtendedState, t: complex) -> ExtendedState:
        """Time derivatives of every layout slot (slots outside the layout are 0)."""
        self.check(theta, state, t)
        d = self._vf(theta, state, complex(t))
        return ExtendedState(**{s: d.get(s, 0j) for s in STATE_SLOTS})

    def vector_field_array(self, theta, y: np.ndarray, t) -> np.ndarray:
        st = ExtendedState.from_array(self.layout, y)
        self.check(theta, st, t)
        d = self._vf(theta, st, complex(t))
        return np.array([d[s] for s in self.layout], dtype=complex)

    def density_breakdown(self, theta: ThetaParams, state: ExtendedState, t: complex) -> DensityBreakdown:
        t = complex(t)
        self.check(theta, state, t)
        H = complex(self._H(theta, state, t))
        corr = complex(self._tau_correction(theta, state, t, H))
        qdot = self._vf(theta, state, t)["q"]
        return DensityBreakdown(
            hamiltonian=H,
            tau_correction=corr,
            tau_density=H + corr,
            action_density=complex(state.p * qdot - H),
            g_value=complex(self._G(theta, state, t, H)),
        )

    def a_matrix(self, theta: ThetaParams, state: ExtendedState, t: complex) -> RationalMatrix:
        self.check(theta, state, t)
        return self._A(theta, state, complex(t))

    def b_matrix(self, theta: ThetaParams, state: ExtendedState, t: complex) -> RationalMatrix:
        self.check(theta, state, t)
        return self._B(theta, state, complex(t))

    def local_frames(self, theta: ThetaParams, state: ExtendedState, t: complex, order: int | None = None) -> list:
        """Frames at every singular point with closed-form data.

        ``order`` caps the number of g-coefficients per frame; it may not exceed
        ``max_order`` (the highest coefficient available for this kind).
        """
        self.check(theta, state, t)
        if order is not None and order > self.max_order:
            raise OrderError(f"{self.kind.value} supplies g-coefficients only up to order {self.max_order}")
        frames = self._frames(theta, state, complex(t))
        if order is None:
            return frames
        return [LocalFrame(fr.location, fr.gauge, fr.series_coeffs[:order], fr.exponent) for fr in frames]

    def painleve_rhs(self, theta: ThetaParams, q, q_dot, t) -> complex:
        q, q_dot, t = complex(q), complex(q_dot), complex(t)
        self.check_time(t)
        guard(**self._scalar_denominators(q, t))
        return complex(self._scalar_rhs(theta, q, q_dot, t))

    def painleve_residual(self, theta: ThetaParams, q, q_dot, q_ddot, t) -> complex:
        """``q_tt - RHS(q, q_t, t)`` of the scalar Painleve equation."""
        return complex(q_ddot) - self.painleve_rhs(theta, q, q_dot, t)


def exponent(polar: list, log_coeff) -> ExponentData:
    return ExponentData(tuple(polar), log_coeff)
