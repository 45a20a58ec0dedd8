"""Numerical certification of the identities between H, the tau density, the action and G.

Every check returns a :class:`ResidualReport`.  Optional keyword hooks let a
caller inject a corrupted ingredient (a wrong Hamiltonian, a flipped vector
field, a dropped correction term, ...) to confirm that the check reacts.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import INFINITY
from .integrate import PathSpec, Tolerances, integrate_path
from .schlesinger import (
    MultiTimePath,
    SchlesingerModel,
    SchlesingerState,
    _spectrum_distance,
    schlesinger_hamiltonians,
    schlesinger_residue_flow,
    schlesinger_vector_field,
)
from .systems import PAIRED_THETA, ExtendedState, PainleveKind, ThetaParams, get_system

__all__ = [
    "ResidualReport",
    "THRESHOLDS",
    "check_lax_compatibility",
    "check_hamilton_equations",
    "check_series_recursion",
    "series_recursion_residuals",
    "check_action_identity",
    "check_variational_identity",
    "check_tau_log_derivative",
    "check_scalar_equation",
    "check_integrator_consistency",
    "check_schlesinger_suite",
    "schlesinger_mixed_partials",
    "CORRUPTIONS",
    "corruption_hooks",
]

THRESHOLDS = {
    "lax_compatibility": 1e-5,
    "hamilton_equations": 1e-5,
    "series_recursion": 1e-9,
    "action_identity": 1e-7,
    "variational_identity": 1e-4,
    "tau_log_derivative": 1e-6,
    "scalar_equation": 1e-5,
    "step_halving": 10.0,
    "concatenation": 1e-9,
    "reversal": 1e-8,
    "isospectrality": 1e-9,
    "residue_sum_conservation": 1e-9,
    "loop_closedness": 1e-8,
    "commutator_agreement": 1e-8,
    "schlesinger_action_identity": 1e-8,
}


def _jsonable(v):
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, ThetaParams):
        return {k: _jsonable(getattr(v, k)) for k in ("theta0", "theta1", "theta_t", "theta_inf")}
    if isinstance(v, PainleveKind):
        return v.value
    return v


@dataclass(frozen=True)
class ResidualReport:
    name: str
    residual: float
    threshold: float
    passed: bool
    context: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "residual", float(self.residual))
        if self.passed != (self.residual <= self.threshold):
            raise ValueError("passed must equal residual <= threshold")

    @classmethod
    def make(cls, name, residual, threshold, **context) -> "ResidualReport":
        r = float(residual)
        if not np.isfinite(r):
            r = float("inf")
        return cls(name, r, float(threshold), r <= threshold, context)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "residual": self.residual,
            "threshold": self.threshold,
            "passed": self.passed,
            "context": _jsonable(self.context),
        }


def _ctx(system, theta, t=None, seed=None, **extra):
    c = {"kind": system.kind.value, "theta": theta}
    if t is not None:
        c["t"] = t
    if seed is not None:
        c["seed"] = seed
    c.update(extra)
    return c


def _fd_step(x: complex, base: float = 1e-6) -> float:
    return base * max(1.0, abs(x))


# --- pointwise checks -------------------------------------------------------

def check_lax_compatibility(system, theta: ThetaParams, state: ExtendedState, t, z_samples, h: float = 2e-5,
                            vector_field=None, theta_a: ThetaParams | None = None, theta_b: ThetaParams | None = None,
                            threshold=None, seed=None):
    """max_z |dA/dt - dB/dz - [B, A]| with dA/dt by a five-point stencil along the flow.

    ``theta_a`` / ``theta_b`` override the exponents used for A / B (sensitivity controls).
    """
    sysm = get_system(system)
    t = complex(t)
    vf = vector_field or sysm.vector_field
    d = vf(theta, state, t)
    h = _fd_step(t, h)
    lay = sysm.layout
    y = state.to_array(lay)
    dy = d.to_array(lay)
    tha = theta_a or theta
    # straight-line advance along the vector field; O(h^4) directional derivative
    shifted = {k: sysm.a_matrix(tha, ExtendedState.from_array(lay, y + k * h * dy), t + k * h) for k in (-2, -1, 1, 2)}
    A0 = sysm.a_matrix(tha, state, t)
    B = sysm.b_matrix(theta_b or theta, state, t)
    worst = 0.0
    for z in z_samples:
        f = {k: m(z) for k, m in shifted.items()}
        dA = (f[-2] - 8 * f[-1] + 8 * f[1] - f[2]) / (12 * h)
        a, b = A0(z), B(z)
        r = dA - B.dz(z) - (b @ a - a @ b)
        worst = max(worst, float(np.abs(r).max()))
    return ResidualReport.make("lax_compatibility", worst, threshold or THRESHOLDS["lax_compatibility"],
                               **_ctx(sysm, theta, t, seed, z_count=len(z_samples)))


def check_hamilton_equations(system, theta: ThetaParams, state: ExtendedState, t, hamiltonian=None, h: float = 1e-6,
                             threshold=None, seed=None):
    """Vector field against central-difference gradients of H, including log-gauge/theta pairs."""
    sysm = get_system(system)
    t = complex(t)
    H = hamiltonian or sysm.hamiltonian
    vf = sysm.vector_field(theta, state, t)
    parts = {}

    def dH(make, x):
        s = _fd_step(x, h)
        return (H(*make(x + s)) - H(*make(x - s))) / (2 * s)

    parts["q"] = abs(vf.q - dH(lambda x: (theta, state.with_(p=x), t), state.p))
    parts["p"] = abs(vf.p + dH(lambda x: (theta, state.with_(q=x), t), state.q))
    for slot in sysm.layout[2:]:
        name = PAIRED_THETA[slot]
        g = dH(lambda x, name=name: (theta.with_(**{name: x}), state, t), theta.get(name))
        parts[slot] = abs(vf.get(slot) + g)
    return ResidualReport.make("hamilton_equations", max(parts.values()), threshold or THRESHOLDS["hamilton_equations"],
                               **_ctx(sysm, theta, t, seed, parts=parts))


def series_recursion_residuals(system, theta, state, t, frames=None) -> list:
    """Per frame: max coefficient norm of ``A~ G^ - G^' - G^ Theta'`` over all determined orders.

    ``A~ = G_nu^{-1} A G_nu``.  With K known g's, relative orders 0..K are fully
    determined.  At an irregular point the diagonal of relative order K+1 is
    determined as well (the unknown g_{K+1} enters it only through a commutator
    with the diagonal leading coefficient) and is included.
    """
    sysm = get_system(system)
    t = complex(t)
    A = sysm.a_matrix(theta, state, t)
    frames = frames if frames is not None else sysm.local_frames(theta, state, t)
    out = []
    for fr in frames:
        loc = fr.location
        At = A.conjugated(fr.gauge)
        r = At.rank_at(loc)
        K = fr.order
        lead = -(r - 1) if loc is INFINITY else -(r + 1)
        pad = 1 if r >= 1 else 0
        top = lead + K + pad
        G = fr.g_series(pad)
        R = At.expand(loc, top) @ G - G.derivative() - G @ fr.exponent.derivative(loc, top)
        if R.order != top:
            raise AssertionError("series order bookkeeping mismatch")
        full = R.max_norm(lead, lead + K)
        diag = float(np.abs(np.diag(R.coeff(top))).max()) if pad else 0.0
        out.append({"location": "inf" if loc is INFINITY else loc, "rank": r, "order": K,
                    "residual": max(full, diag)})
    return out


def check_series_recursion(system, theta, state, t, location=None, frames=None, frames_factory=None,
                           threshold=None, seed=None):
    """Worst series-recursion residual over all frames (or the one at ``location``).

    ``frames`` replaces the system's frames; ``frames_factory(theta, state, t)`` builds them.
    """
    sysm = get_system(system)
    if frames is None and frames_factory is not None:
        frames = frames_factory(theta, state, t)
    parts = series_recursion_residuals(sysm, theta, state, t, frames)
    if location is not None:
        key = "inf" if location is INFINITY else complex(location)
        parts = [p for p in parts if p["location"] == key or (key != "inf" and p["location"] != "inf"
                                                            and abs(p["location"] - key) < 1e-12)]
        if not parts:
            raise ValueError(f"no frame at {location!r}")
    worst = max(p["residual"] for p in parts)
    return ResidualReport.make("series_recursion", worst, threshold or THRESHOLDS["series_recursion"],
                               **_ctx(sysm, theta, t, seed, frames=parts))


# --- trajectory checks ------------------------------------------------------

def check_action_identity(system, theta, initial_state, path: PathSpec, tol: Tolerances | None = None, gamma=None,
                          result=None, threshold=None, seed=None):
    """|Delta ln tau - gamma Delta S - (G_end - G_start)| from one integration."""
    sysm = get_system(system)
    res = result or integrate_path(sysm, theta, initial_state, path, tol)
    g = float(sysm.gamma) if gamma is None else gamma
    r = abs(res.delta_ln_tau - g * res.delta_action - (res.g_end - res.g_start))
    return ResidualReport.make("action_identity", r, threshold or THRESHOLDS["action_identity"],
                               **_ctx(sysm, theta, path.waypoints[0], seed, gamma=g, delta_action=res.delta_action,
                                      delta_ln_tau=res.delta_ln_tau))


VARIATIONAL_TOL = Tolerances(rel_tol=1e-12, abs_tol=1e-14)
# pointwise derivative checks differentiate the interpolant, which loses digits
DENSE_TOL = Tolerances(rel_tol=1e-13, abs_tol=1e-15)


def check_variational_identity(system, theta, initial_state, path: PathSpec, direction, h: float = 1e-5,
                               include_dG: bool = True, dG_weight: float = 1.0, tol: Tolerances | None = None,
                               threshold=None, seed=None):
    """delta(Delta ln tau) against the boundary terms [gamma p dq + dG]_start^end.

    ``direction`` perturbs the initial data (dict slot -> complex, or an
    ExtendedState of increments); central differences with step ``h``.
    ``dG_weight`` (or ``include_dG=False``) rescales the dG term for controls.
    """
    w = dG_weight if include_dG else 0.0
    sysm = get_system(system)
    if h < 1e-9:
        raise ValueError("h below the integration noise floor")
    lay = sysm.layout
    if isinstance(direction, ExtendedState):
        dvec = direction.to_array(lay)
    else:
        dvec = np.array([complex(direction.get(s, 0)) for s in lay])
    if not np.any(dvec):
        return ResidualReport.make("variational_identity", 0.0, threshold or THRESHOLDS["variational_identity"],
                                   **_ctx(sysm, theta, path.waypoints[0], seed, note="zero direction"))
    tol = tol or VARIATIONAL_TOL
    y0 = initial_state.to_array(lay)
    runs = []
    for sgn in (1, -1):
        st = ExtendedState.from_array(lay, y0 + sgn * h * dvec)
        runs.append((st, integrate_path(sysm, theta, st, path, tol)))
    (sp, rp), (sm, rm) = runs
    g = float(sysm.gamma)
    lhs = (rp.delta_ln_tau - rm.delta_ln_tau) / (2 * h)

    def boundary(st_p, st_m, g_p, g_m):
        pq = g * 0.5 * (st_p.p + st_m.p) * (st_p.q - st_m.q) / (2 * h)
        dg = (g_p - g_m) / (2 * h)
        return pq + w * dg

    end_p, end_m = rp.final_state, rm.final_state
    rhs = boundary(end_p, end_m, rp.g_end, rm.g_end) - boundary(sp, sm, rp.g_start, rm.g_start)
    delta_g = (rp.g_end - rm.g_end - rp.g_start + rm.g_start) / (2 * h)
    return ResidualReport.make("variational_identity", abs(lhs - rhs), threshold or THRESHOLDS["variational_identity"],
                               **_ctx(sysm, theta, path.waypoints[0], seed, h=h, dG_weight=w,
                                      delta_lntau_variation=lhs, delta_G_variation=delta_g))


def _interior_sigmas(result, n_points: int) -> np.ndarray:
    segs = result.path.segments
    return (np.arange(n_points) + 0.5) / n_points * segs


def check_tau_log_derivative(system, theta, initial_state, path: PathSpec, n_points: int = 50,
                             tau_correction=None, tol: Tolerances | None = None, result=None, threshold=None,
                             seed=None):
    """d/dt of the integrated ln tau (dense output) against the tau density, pointwise.

    For P3 it also checks pq/t = (1/4) d/dt(log a - log k) - (theta0 + theta_inf)/(2t).
    ``tau_correction(theta, state, t, H)`` replaces the correction term in the comparison only.
    """
    sysm = get_system(system)
    res = result or integrate_path(sysm, theta, initial_state, path, tol or DENSE_TOL)
    lay = sysm.layout
    n = len(lay)
    worst = 0.0
    p3 = 0.0
    for sig in _interior_sigmas(res, n_points):
        t = res.t_at(sig)
        st = res.state_at(sig)
        dy = res.derivative(sig)
        H = sysm.hamiltonian(theta, st, t)
        corr = tau_correction(theta, st, t, H) if tau_correction else sysm.density_breakdown(theta, st, t).tau_correction
        worst = max(worst, abs(dy[n] - (H + corr)))
        if sysm.kind == PainleveKind.P3:
            d_la = dy[lay.index("log_a")]
            d_lk = dy[lay.index("log_k")]
            r = st.p * st.q / t - 0.25 * (d_la - d_lk) + (theta.theta0 + theta.theta_inf) / (2 * t)
            p3 = max(p3, abs(r))
    thr = threshold or THRESHOLDS["tau_log_derivative"]
    extra = {"density_residual": worst}
    if sysm.kind == PainleveKind.P3:
        extra["p3_log_gauge_residual"] = p3
    return ResidualReport.make("tau_log_derivative", max(worst, p3), thr,
                               **_ctx(sysm, theta, path.waypoints[0], seed, n_points=n_points, **extra))


def check_scalar_equation(system, theta, initial_state, path: PathSpec, n_points: int = 50,
                          tol: Tolerances | None = None, result=None, threshold=None, seed=None):
    """Scalar Painleve residual with q_t, q_tt differentiated from the dense output."""
    sysm = get_system(system)
    res = result or integrate_path(sysm, theta, initial_state, path, tol or DENSE_TOL)
    worst = 0.0
    for sig in _interior_sigmas(res, n_points):
        t = res.t_at(sig)
        q = res.y_at(sig)[0]
        qd = res.derivative(sig, 1)[0]
        qdd = res.derivative(sig, 2)[0]
        worst = max(worst, abs(sysm.painleve_residual(theta, q, qd, qdd, t)))
    return ResidualReport.make("scalar_equation", worst, threshold or THRESHOLDS["scalar_equation"],
                               **_ctx(sysm, theta, path.waypoints[0], seed, n_points=n_points,
                                      coefficients=sysm.scalar_coefficients(theta)))


def check_integrator_consistency(system, theta, initial_state, path: PathSpec, tol: Tolerances | None = None,
                                 seed=None) -> list:
    """Step-halving, concatenation (split at the midpoint) and reversal reports for a one-segment path."""
    sysm = get_system(system)
    tol = tol or Tolerances()
    a, b = path.waypoints[0], path.waypoints[-1]
    lay = sysm.layout
    base = integrate_path(sysm, theta, initial_state, PathSpec((a, b), path.guard_radius), tol)
    half = integrate_path(sysm, theta, initial_state, PathSpec((a, b), path.guard_radius), tol.scaled(0.5))
    y1, y2 = base.ys[-1], half.ys[-1]
    scale = tol.abs_tol + tol.rel_tol * np.abs(y1)
    halving = float(np.max(np.abs(y1 - y2) / scale))

    mid = (a + b) / 2
    r1 = integrate_path(sysm, theta, initial_state, PathSpec((a, mid), path.guard_radius), tol)
    r2 = integrate_path(sysm, theta, r1.final_state, PathSpec((mid, b), path.guard_radius), tol)
    concat = max(abs(r1.delta_ln_tau + r2.delta_ln_tau - base.delta_ln_tau),
                 abs(r1.delta_action + r2.delta_action - base.delta_action))

    back = integrate_path(sysm, theta, initial_state, PathSpec((a, b, a), path.guard_radius), tol)
    rev = max(float(np.abs(back.ys[-1][: len(lay)] - initial_state.to_array(lay)).max()),
              abs(back.delta_ln_tau), abs(back.delta_action))
    ctx = _ctx(sysm, theta, a, seed)
    return [
        ResidualReport.make("step_halving", halving, THRESHOLDS["step_halving"], **ctx),
        ResidualReport.make("concatenation", concat, THRESHOLDS["concatenation"], **ctx),
        ResidualReport.make("reversal", rev, THRESHOLDS["reversal"], **ctx),
    ]


# --- Schlesinger --------------------------------------------------------------

def _commutator_agreement(model, st: SchlesingerState, vector_field) -> float:
    worst = 0.0
    for nu in range(st.pole_count):
        dQ, dP = vector_field(model, st, nu)
        dA = dQ @ st.p_mats + st.q_mats @ dP
        ref = schlesinger_residue_flow(model, st, nu)
        worst = max(worst, float(np.abs(dA - ref).max()))
    return worst


def check_schlesinger_suite(model: SchlesingerModel, initial_state: SchlesingerState, loop: MultiTimePath,
                            tol: Tolerances | None = None, vector_field=None, seed=None) -> list:
    """Isospectrality, conservation of sum A, loop closedness, commutator agreement, action identity."""
    vf = vector_field or schlesinger_vector_field
    waypoints = tuple(np.array(w, dtype=complex) for w in loop.waypoints)
    if not np.allclose(waypoints[0], initial_state.poles):
        raise ValueError("loop must start at the initial pole positions")
    closed = bool(np.allclose(waypoints[0], waypoints[-1]))
    path = PathSpec(waypoints)
    res = integrate_path("schlesinger", model, initial_state, path, tol, vector_field=vf)
    A0 = initial_state.residues().sum(axis=0)
    spec = 0.0
    drift = 0.0
    comm = _commutator_agreement(model, initial_state, vf)
    for t, st in res.samples:
        A = st.residues()
        for nu in range(st.pole_count):
            spec = max(spec, _spectrum_distance(np.linalg.eigvals(A[nu]), model.thetas[nu]))
        total = A.sum(axis=0)
        drift = max(drift, float(np.abs(total - A0).max()), float(np.abs(total - np.diag(np.diag(total))).max()))
        comm = max(comm, _commutator_agreement(model, st, vf))
    ctx = {"system": "schlesinger", "mat_dim": model.mat_dim, "pole_count": model.pole_count, "seed": seed,
           "closed_loop": closed, "steps": res.step_stats.accepted}
    reports = [
        ResidualReport.make("isospectrality", spec, THRESHOLDS["isospectrality"], **ctx),
        ResidualReport.make("residue_sum_conservation", drift, THRESHOLDS["residue_sum_conservation"], **ctx),
    ]
    if closed:
        reports.append(ResidualReport.make("loop_closedness", abs(res.delta_ln_tau), THRESHOLDS["loop_closedness"],
                                           **ctx))
    reports.append(ResidualReport.make("commutator_agreement", comm, THRESHOLDS["commutator_agreement"], **ctx))
    reports.append(ResidualReport.make("schlesinger_action_identity", abs(res.delta_ln_tau - res.delta_action),
                                       THRESHOLDS["schlesinger_action_identity"], **ctx))
    return reports


def schlesinger_mixed_partials(model, state: SchlesingerState, h: float = 1e-5) -> float:
    """max |dH_mu/da_nu - dH_nu/da_mu| with total derivatives along the flow (central differences)."""
    n = state.pole_count
    worst = 0.0

    def moved(nu, s):
        dQ, dP = schlesinger_vector_field(model, state, nu)
        poles = state.poles.copy()
        poles[nu] += s
        return SchlesingerState(poles, state.q_mats + s * dQ, state.p_mats + s * dP)

    grads = np.zeros((n, n), dtype=complex)
    for nu in range(n):
        hp = schlesinger_hamiltonians(model, moved(nu, h))
        hm = schlesinger_hamiltonians(model, moved(nu, -h))
        grads[:, nu] = (hp - hm) / (2 * h)
    for mu in range(n):
        for nu in range(mu + 1, n):
            worst = max(worst, abs(grads[mu, nu] - grads[nu, mu]))
    return worst


# --- corruption controls ----------------------------------------------------
# name -> (check it targets, factory(system, theta, amount) -> keyword overrides).
# Every perturbation is linear in ``amount``; amount 0 is the honest check.

def _shift_h(sysm, theta, amount):
    return {"hamiltonian": lambda th, st, t: sysm.hamiltonian(th, st, t) + amount * st.q}


def _flip_p(sysm, theta, amount):
    def vf(th, st, t):
        d = sysm.vector_field(th, st, t)
        return d.with_(p=d.p * (1 - 2 * amount))
    return {"vector_field": vf}


def _shift_theta(sysm, theta, amount):
    if not sysm.spec.param_names:
        raise ValueError(f"{sysm.kind.value} has no exponents to perturb")
    name = sysm.spec.param_names[0]
    return {"theta_a": theta.with_(**{name: theta.get(name) + amount})}


def _perturb_g(sysm, theta, amount):
    def frames(th, st, t):
        out = []
        done = False
        for fr in sysm.local_frames(th, st, t):
            cs = list(fr.series_coeffs)
            if cs and not done:
                j = 1 if len(cs) > 1 else 0
                m = cs[j].copy()
                m[0, 1] += amount
                cs[j] = m
                done = True
            out.append(type(fr)(fr.location, fr.gauge, tuple(cs), fr.exponent))
        return out
    return {"frames_factory": frames}


def _shift_gamma(sysm, theta, amount):
    return {"gamma": float(sysm.gamma) - amount}


def _weight_dg(sysm, theta, amount):
    return {"dG_weight": 1.0 - amount}


def _drop_correction(sysm, theta, amount):
    def corr(th, st, t, H):
        return (1 - amount) * sysm.density_breakdown(th, st, t).tau_correction
    return {"tau_correction": corr}


def _shift_correction(sysm, theta, amount):
    def corr(th, st, t, H):
        return sysm.density_breakdown(th, st, t).tau_correction + amount * st.q
    return {"tau_correction": corr}


def _flip_schlesinger_p(model, theta, amount):
    def vf(m, st, nu):
        dQ, dP = schlesinger_vector_field(m, st, nu)
        return dQ, dP * (1 - 2 * amount)
    return {"vector_field": vf}


CORRUPTIONS = {
    "hamiltonian_shift": ("hamilton_equations", _shift_h),
    "p_advance_flip": ("lax_compatibility", _flip_p),
    "theta_shift": ("lax_compatibility", _shift_theta),
    "g_perturb": ("series_recursion", _perturb_g),
    "gamma_shift": ("action_identity", _shift_gamma),
    "dG_drop": ("variational_identity", _weight_dg),
    "tau_correction_drop": ("tau_log_derivative", _drop_correction),
    "tau_correction_shift": ("tau_log_derivative", _shift_correction),
    "schlesinger_p_flip": ("schlesinger_suite", _flip_schlesinger_p),
}


def corruption_hooks(name: str, system, theta, amount: float = 1.0):
    """``(check_name, kwargs)`` injecting the named corruption at the given strength."""
    if name not in CORRUPTIONS:
        raise KeyError(f"unknown corruption {name!r}; known: {sorted(CORRUPTIONS)}")
    check, factory = CORRUPTIONS[name]
    target = system if check == "schlesinger_suite" else get_system(system)
    return check, factory(target, theta, amount)
