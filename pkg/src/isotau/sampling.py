"""Random admissible inputs for the verification suites.

Values are drawn uniformly from bounded boxes (|q|, |p| <= 2, |theta| <= 1,
log-gauge slots <= 1) and rejected when any denominator, degenerate exponent
or singular time is closer than ``margin``.  The margin is much wider than the
hard evaluation guard so that absolute residual thresholds stay meaningful.
"""
from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import GuardError, IntegrationAbort, SingularMatrixError
from .integrate import PathSpec, Tolerances, _segment_distance, integrate_path
from .systems import ExtendedState, PainleveKind, ThetaParams, get_system

__all__ = ["disk", "random_theta", "random_state", "random_time", "sample_point", "sample_path", "draw_trajectory"]

MARGIN = 0.25
BOX = 20.0
MAX_SPEED = 25.0


def disk(rng: np.random.Generator, radius: float) -> complex:
    r = radius * math.sqrt(rng.uniform())
    return cmath.rect(r, rng.uniform(0, 2 * math.pi))


def random_theta(kind, rng) -> ThetaParams:
    names = get_system(kind).spec.param_names
    return ThetaParams(**{n: disk(rng, 1.0) for n in names})


def random_state(kind, rng) -> ExtendedState:
    layout = get_system(kind).layout
    vals = {"q": disk(rng, 2.0), "p": disk(rng, 2.0)}
    for s in layout[2:]:
        vals[s] = disk(rng, 1.0)
    return ExtendedState(**vals)


def random_time(kind, rng) -> complex:
    kind = get_system(kind).kind
    if kind in (PainleveKind.P3, PainleveKind.P5):
        return cmath.rect(rng.uniform(0.5, 2.0), rng.uniform(0, 2 * math.pi))
    return disk(rng, 2.0)


def _margins(kind, theta, st, t) -> dict:
    kind = get_system(kind).kind
    q = st.q
    m = {}
    if kind == PainleveKind.P3:
        m.update(t=t, q=q)
    elif kind == PainleveKind.P4:
        m.update(q=q, theta0=theta.theta0)
    elif kind == PainleveKind.P5:
        m.update(t=t, q=q, q1=q - 1, theta0=theta.theta0, theta1=theta.theta1)
    elif kind == PainleveKind.P6:
        m.update(t=t, t1=t - 1, q=q, q1=q - 1, qt=q - t, theta_inf=theta.theta_inf, theta_t=theta.theta_t,
                 tm=1 - 2 * theta.theta_t, tp=1 + 2 * theta.theta_t)
    return m


def _frames_ok(kind, theta, st, t, max_cond: float = 1e4) -> bool:
    sysm = get_system(kind)
    try:
        sysm.a_matrix(theta, st, t)
        for fr in sysm.local_frames(theta, st, t):
            if np.linalg.cond(fr.gauge) > max_cond:
                return False
        if sysm.kind == PainleveKind.P6:
            prm = sysm.residue_params(theta, st, t)
            if min(abs(prm.x0), abs(prm.x1), abs(prm.xt)) < 0.05:
                return False
    except (GuardError, SingularMatrixError, ZeroDivisionError, OverflowError):
        return False
    return True


def admissible(kind, theta, st, t, margin: float = MARGIN, frames: bool = True) -> bool:
    if any(abs(v) < margin for v in _margins(kind, theta, st, t).values()):
        return False
    return _frames_ok(kind, theta, st, t) if frames else True


def sample_point(kind, rng, margin: float = MARGIN, frames: bool = True, max_tries: int = 10000):
    """Random admissible ``(theta, state, t)``."""
    for _ in range(max_tries):
        theta = random_theta(kind, rng)
        st = random_state(kind, rng)
        t = random_time(kind, rng)
        if admissible(kind, theta, st, t, margin, frames):
            return theta, st, t
    raise RuntimeError(f"no admissible point found for {kind}")


def sample_path(kind, rng, t0: complex, length: float = 1.0, margin: float = 0.3, max_tries: int = 1000) -> PathSpec:
    """Straight path of the given length from ``t0`` keeping ``margin`` from singular times."""
    sing = get_system(kind).singular_times()
    for _ in range(max_tries):
        t1 = t0 + cmath.rect(length, rng.uniform(0, 2 * math.pi))
        if all(_segment_distance(t0, t1, c) >= margin for c in sing):
            return PathSpec((t0, t1))
    raise RuntimeError("no admissible path direction")


def draw_trajectory(kind, rng, length: float = 1.0, tol: Tolerances | None = None, max_tries: int = 200,
                    box: float = BOX, max_speed: float = MAX_SPEED):
    """Random initial data and unit path that stays clear of movable poles.

    Returns ``(theta, state, path, result, attempts)``.  Runs that abort, leave
    ``box`` or move faster than ``max_speed`` (|dy/dt| at any accepted step) are
    redrawn; pointwise residuals scale with the size of the solution's
    derivatives, so near-pole passages would only measure conditioning.
    """
    for attempt in range(1, max_tries + 1):
        theta, st, t0 = sample_point(kind, rng, frames=False)
        try:
            path = sample_path(kind, rng, t0, length)
            res = integrate_path(kind, theta, st, path, tol)
        except (IntegrationAbort, GuardError, RuntimeError):
            continue
        if np.abs(res.ys[:, : res.state_dim]).max() > box:
            continue
        if _max_speed(kind, theta, res) > max_speed:
            continue
        if not _path_margins_ok(kind, theta, res):
            continue
        return theta, st, path, res, attempt
    raise RuntimeError(f"no well-behaved trajectory found for {kind}")


def _max_speed(kind, theta, res) -> float:
    sysm = get_system(kind)
    n = res.state_dim
    return max(float(np.abs(sysm.vector_field_array(theta, y[:n], t)).max())
               for (t, _), y in zip(res.samples, res.ys))


def _path_margins_ok(kind, theta, res, margin: float = 0.05) -> bool:
    for t, st in res.samples:
        if any(abs(v) < margin for k, v in _margins(kind, theta, st, t).items() if k.startswith("q")):
            return False
    return True
