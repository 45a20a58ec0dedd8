"""Adaptive integration of Painleve and Schlesinger flows along piecewise-linear paths.

Each segment ``w_i -> w_{i+1}`` is parametrized by ``sigma in [i, i+1]`` so the
integrator stays real-parametrized while the state is complex; every density
picks up the chain-rule factor ``w_{i+1} - w_i``.  Two accumulator slots ride in
the integrated vector: ``ln tau`` (tau density) and the action ``S`` (action
density).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.integrate import DOP853, RK45

from .errors import GuardError, IntegrationAbort
from .schlesinger import (
    MultiTimePath,
    SchlesingerModel,
    SchlesingerState,
    schlesinger_hamiltonians,
    schlesinger_vector_field,
)
from .systems import ExtendedState, PainleveSystem, ThetaParams, get_system

__all__ = ["PathSpec", "Tolerances", "StepStats", "IntegrationResult", "integrate_path", "dense_samples"]

_METHODS = {"DOP853": (DOP853, 12), "RK45": (RK45, 6)}
BLOWUP = 1e8


@dataclass(frozen=True, eq=False)
class PathSpec:
    """Waypoints: complex t values (Painleve) or pole-position vectors (Schlesinger)."""

    waypoints: tuple
    guard_radius: float = 1e-3

    def __post_init__(self):
        w = [np.array(x, dtype=complex) for x in self.waypoints]
        if len(w) < 2:
            raise ValueError("a path needs at least two waypoints")
        if self.guard_radius <= 0:
            raise ValueError("guard radius must be positive")
        shapes = {x.shape for x in w}
        if len(shapes) != 1:
            raise ValueError("waypoints must share one shape")
        object.__setattr__(self, "waypoints", tuple(x if x.ndim else complex(x) for x in w))

    @property
    def segments(self) -> int:
        return len(self.waypoints) - 1

    def point(self, sigma: float):
        i = min(int(math.floor(sigma)), self.segments - 1)
        i = max(i, 0)
        s = sigma - i
        a, b = self.waypoints[i], self.waypoints[i + 1]
        return a + s * (b - a)

    def reversed(self) -> "PathSpec":
        return PathSpec(tuple(reversed(self.waypoints)), self.guard_radius)

    def then(self, other: "PathSpec") -> "PathSpec":
        return PathSpec(tuple(self.waypoints) + tuple(other.waypoints[1:]), self.guard_radius)


@dataclass(frozen=True)
class Tolerances:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = np.inf
    min_step: float = 1e-14
    method: str = "DOP853"

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not (0 < self.min_step < self.max_step):
            raise ValueError("need 0 < min_step < max_step")
        if self.method not in _METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {sorted(_METHODS)}")

    def scaled(self, factor: float) -> "Tolerances":
        return Tolerances(self.rel_tol * factor, self.abs_tol * factor, self.max_step, self.min_step, self.method)


@dataclass
class StepStats:
    accepted: int = 0
    rejected: int = 0
    nfev: int = 0


# --- flow adapters --------------------------------------------------------

class _PainleveFlow:
    def __init__(self, system: PainleveSystem, theta: ThetaParams):
        self.system = system
        self.theta = theta
        self.layout = system.layout
        self.dim = len(self.layout)

    def pack(self, state: ExtendedState) -> np.ndarray:
        return state.to_array(self.layout)

    def unpack(self, y, t=None) -> ExtendedState:
        return ExtendedState.from_array(self.layout, y[: self.dim])

    def rhs(self, t, dt, y):
        st = self.unpack(y)
        sysm, th = self.system, self.theta
        sysm.check(th, st, t)
        d = sysm._vf(th, st, t)
        H = sysm._H(th, st, t)
        tau = H + sysm._tau_correction(th, st, t, H)
        act = st.p * d["q"] - H
        out = np.empty(self.dim + 2, dtype=complex)
        for i, s in enumerate(self.layout):
            out[i] = d[s]
        out[self.dim] = tau
        out[self.dim + 1] = act
        return out * dt

    def g_value(self, t, y) -> complex:
        return self.system.density_breakdown(self.theta, self.unpack(y), t).g_value

    def check_path(self, path: PathSpec):
        sing = self.system.singular_times(self.theta)
        for i in range(path.segments):
            a, b = complex(path.waypoints[i]), complex(path.waypoints[i + 1])
            for c in sing:
                if _segment_distance(a, b, c) < path.guard_radius:
                    raise GuardError(f"path segment {i} passes within {path.guard_radius:g} of singular time {c}")

    def column_names(self):
        return list(self.layout)


class _SchlesingerFlow:
    def __init__(self, model: SchlesingerModel, vector_field=None):
        self.model = model
        self.n = model.pole_count
        self.N = model.mat_dim
        self.dim = 2 * self.n * self.N * self.N
        self.vector_field = vector_field or schlesinger_vector_field

    def pack(self, state: SchlesingerState) -> np.ndarray:
        return state.to_array()

    def unpack(self, y, t=None) -> SchlesingerState:
        poles = np.zeros(self.n) if t is None else t
        return SchlesingerState.from_array(poles, y[: self.dim], self.n, self.N)

    def rhs(self, t, dt, y):
        st = self.unpack(y, t)
        H = schlesinger_hamiltonians(self.model, st)
        dQ = np.zeros_like(st.q_mats)
        dP = np.zeros_like(st.p_mats)
        pdq = 0j
        for nu in range(self.n):
            if dt[nu] == 0:
                continue
            q_nu, p_nu = self.vector_field(self.model, st, nu)
            dQ += dt[nu] * q_nu
            dP += dt[nu] * p_nu
            pdq += dt[nu] * np.einsum("nij,nji->", st.p_mats, q_nu)
        tau = np.dot(H, dt)
        out = np.concatenate([dQ.ravel(), dP.ravel(), [tau, pdq - tau]])
        return out

    def g_value(self, t, y) -> complex:
        return 0j

    def check_path(self, path: PathSpec):
        MultiTimePath(np.array(path.waypoints)).check(path.guard_radius)

    def column_names(self):
        names = []
        for label in ("Q", "P"):
            for nu in range(self.n):
                for i in range(self.N):
                    for j in range(self.N):
                        names.append(f"{label}{nu + 1}_{i + 1}{j + 1}")
        return names


def _segment_distance(a: complex, b: complex, c: complex) -> float:
    d = b - a
    if d == 0:
        return abs(c - a)
    s = ((c - a) * d.conjugate()).real / abs(d) ** 2
    s = min(1.0, max(0.0, s))
    return abs(a + s * d - c)


# --- result ---------------------------------------------------------------

@dataclass(eq=False)
class _Step:
    s0: float
    s1: float
    segment: int
    interp: object
    _cheb: object = None


@dataclass(eq=False)
class IntegrationResult:
    """Accepted-step samples plus accumulated Delta ln tau, Delta S and endpoint G."""

    samples: list
    delta_ln_tau: complex
    delta_action: complex
    g_start: complex
    g_end: complex
    step_stats: StepStats
    sigmas: np.ndarray = field(repr=False, default=None)
    ys: np.ndarray = field(repr=False, default=None)
    path: PathSpec = field(repr=False, default=None)
    _flow: object = field(repr=False, default=None)
    _steps: list = field(repr=False, default_factory=list)

    @property
    def state_dim(self) -> int:
        return self._flow.dim

    @property
    def column_names(self) -> list:
        return self._flow.column_names()

    @property
    def final_state(self):
        return self.samples[-1][1]

    def t_at(self, sigma: float):
        return self.path.point(sigma)

    def _step_for(self, sigma: float) -> _Step:
        if not self._steps:
            raise ValueError("result has no stored steps")
        lo = 0
        hi = len(self._steps) - 1
        if sigma <= self._steps[0].s1:
            return self._steps[0]
        while lo < hi:
            mid = (lo + hi) // 2
            if self._steps[mid].s1 < sigma:
                lo = mid + 1
            else:
                hi = mid
        return self._steps[lo]

    def y_at(self, sigma: float) -> np.ndarray:
        """Full integrated vector (state + accumulators) at path parameter ``sigma``."""
        if not self._steps:
            return self.ys[0].copy()
        return np.asarray(self._step_for(sigma).interp(sigma), dtype=complex)

    def state_at(self, sigma: float):
        return self._flow.unpack(self.y_at(sigma), self.t_at(sigma))

    def derivative(self, sigma: float, order: int = 1) -> np.ndarray:
        """``d^order y / dt^order`` from the step interpolant (Painleve paths only)."""
        if not self._steps:
            return np.zeros_like(self.ys[0])
        st = self._step_for(sigma)
        if st._cheb is None:
            deg = 11
            x = np.cos(np.pi * (np.arange(deg + 1) + 0.5) / (deg + 1))
            sig = st.s0 + (x + 1) * (st.s1 - st.s0) / 2
            vals = np.array([st.interp(s) for s in sig])
            st._cheb = C.chebfit(x, vals, deg)
        x = (2 * sigma - st.s0 - st.s1) / (st.s1 - st.s0)
        coef = C.chebder(st._cheb, order, scl=2.0 / (st.s1 - st.s0))
        dyds = C.chebval(x, coef)
        seg = st.segment
        dt = self.path.waypoints[seg + 1] - self.path.waypoints[seg]
        return dyds / dt**order


def _make_flow(system, theta_or_model, vector_field=None):
    if isinstance(theta_or_model, SchlesingerModel):
        return _SchlesingerFlow(theta_or_model, vector_field)
    return _PainleveFlow(get_system(system), theta_or_model)


def integrate_path(system, theta_or_model, initial_state, path: PathSpec, tol: Tolerances | None = None,
                   vector_field=None) -> IntegrationResult:
    """Integrate along ``path``.

    ``system`` is a Painleve kind (tag, spec or object) with ``ThetaParams``, or
    ``"schlesinger"`` with a :class:`SchlesingerModel`.  Raises
    :class:`IntegrationAbort` on step underflow, non-finite values or a guard hit,
    reporting the last good time.
    """
    tol = tol or Tolerances()
    flow = _make_flow(system, theta_or_model, vector_field)
    flow.check_path(path)
    solver_cls, stages = _METHODS[tol.method]

    y = np.concatenate([flow.pack(initial_state), [0j, 0j]])
    y = y.astype(complex)
    t0 = path.waypoints[0]
    flow.rhs(t0, _zero_like(t0), y)  # guards at the start point
    g_start = flow.g_value(t0, y)

    sigmas = [0.0]
    ys = [y.copy()]
    steps = []
    stats = StepStats()
    calls = [0]

    for seg in range(path.segments):
        a, b = path.waypoints[seg], path.waypoints[seg + 1]
        dt = b - a

        def fun(s, yy, a=a, dt=dt, seg=seg):
            calls[0] += 1
            t = a + (s - seg) * dt
            return flow.rhs(t, dt, yy)

        if np.all(np.abs(dt) == 0):
            continue
        try:
            solver = solver_cls(fun, float(seg), y, float(seg + 1), rtol=tol.rel_tol, atol=tol.abs_tol,
                                max_step=tol.max_step)
        except GuardError as exc:
            raise IntegrationAbort(str(exc), last_t=a, last_sigma=float(seg)) from None
        while solver.status == "running":
            before = calls[0]
            last_s = solver.t
            try:
                msg = solver.step()
            except GuardError as exc:
                raise IntegrationAbort(f"guard violated: {exc}", last_t=path.point(last_s), last_sigma=last_s) from None
            attempts = max(1, (calls[0] - before) // stages)
            stats.rejected += attempts - 1
            if solver.status == "failed":
                raise IntegrationAbort(f"step failure near a movable pole: {msg}", last_t=path.point(last_s),
                                       last_sigma=last_s)
            h = solver.t - solver.t_old
            if h < tol.min_step and solver.t < seg + 1:
                raise IntegrationAbort(f"step size {h:.2e} below minimum {tol.min_step:.1e}",
                                       last_t=path.point(last_s), last_sigma=last_s)
            if not np.all(np.isfinite(solver.y)) or np.abs(solver.y[: flow.dim]).max() > BLOWUP:
                raise IntegrationAbort("state left the finite region (movable pole?)", last_t=path.point(last_s),
                                       last_sigma=last_s)
            stats.accepted += 1
            steps.append(_Step(solver.t_old, solver.t, seg, solver.dense_output()))
            sigmas.append(solver.t)
            ys.append(solver.y.copy())
        y = solver.y.copy()
    stats.nfev = calls[0]

    t_end = path.waypoints[-1]
    y_end = ys[-1]
    g_end = flow.g_value(t_end, y_end)
    sig_arr = np.array(sigmas)
    samples = [(path.point(s), flow.unpack(v, path.point(s))) for s, v in zip(sigmas, ys)]
    return IntegrationResult(
        samples=samples,
        delta_ln_tau=complex(y_end[flow.dim]),
        delta_action=complex(y_end[flow.dim + 1]),
        g_start=complex(g_start),
        g_end=complex(g_end),
        step_stats=stats,
        sigmas=sig_arr,
        ys=np.array(ys),
        path=path,
        _flow=flow,
        _steps=steps,
    )


def _zero_like(t):
    return np.zeros_like(t) if np.ndim(t) else 0j


def dense_samples(result: IntegrationResult, count: int) -> list:
    """``count`` samples ``(sigma, t, state, y)`` equally spaced in the path parameter.

    ``count`` equal to the number of stored samples returns the stored ones.
    """
    if result.ys is None or len(result.ys) == 0:
        raise ValueError("empty integration result")
    if count < 2 and count != len(result.sigmas):
        raise ValueError("need at least two samples")
    if count == len(result.sigmas):
        sig = result.sigmas
        ys = result.ys
    else:
        sig = np.linspace(0.0, float(result.path.segments), count)
        ys = [result.y_at(s) for s in sig]
        ys[0] = result.ys[0]
        ys[-1] = result.ys[-1]
    out = []
    for s, y in zip(sig, ys):
        t = result.t_at(float(s))
        out.append((float(s), t, result._flow.unpack(y, t), np.asarray(y)))
    return out
