"""Fuchsian N x N systems ``dPhi/dz = sum_nu A_nu/(z - a_nu) Phi`` and their Schlesinger flows.

Residues are held in matrix Darboux coordinates ``A_nu = Q_nu P_nu`` with
``Q_nu = G_nu Theta_nu`` and ``P_nu = G_nu^{-1}``.  The flow in the pole
positions is generated by

    H_nu = sum_{mu != nu} Tr(Q_mu P_mu Q_nu P_nu) / (a_nu - a_mu)

through ``dQ/da_nu = dH_nu/dP``, ``dP/da_nu = -dH_nu/dQ`` where the matrix
gradient is taken with transposed indices: ``(dH/dP)_{jk} = dH/dP_{kj}``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import mat_inverse
from .errors import GuardError, SingularMatrixError

__all__ = [
    "SchlesingerModel",
    "SchlesingerState",
    "MultiTimePath",
    "state_from_gauges",
    "random_model_and_state",
    "schlesinger_hamiltonians",
    "schlesinger_vector_field",
    "schlesinger_residue_flow",
    "schlesinger_tau_density",
    "schlesinger_action_density",
]

POLE_GUARD = 1e-8
GAUGE_MAX_COND = 1e8


@dataclass(frozen=True, eq=False)
class SchlesingerModel:
    """Formal monodromy exponents of the Fuchsian system."""

    mat_dim: int
    pole_count: int
    thetas: tuple
    theta_inf: np.ndarray
    trace_free: bool = False

    def __post_init__(self):
        N, n = int(self.mat_dim), int(self.pole_count)
        if N < 2 or n < 2:
            raise ValueError("need matrix dimension >= 2 and at least two poles")
        thetas = tuple(np.array(th, dtype=complex).reshape(N) for th in self.thetas)
        if len(thetas) != n:
            raise ValueError(f"expected {n} exponent vectors, got {len(thetas)}")
        tinf = np.array(self.theta_inf, dtype=complex).reshape(N)
        for nu, th in enumerate(thetas):
            for i in range(N):
                for j in range(i + 1, N):
                    d = th[i] - th[j]
                    if abs(d) < 1e-8:
                        raise ValueError(f"exponents of pole {nu} are not distinct")
                    if abs(d.imag) < 1e-8 and abs(d.real - round(d.real)) < 1e-8:
                        raise ValueError(f"exponents of pole {nu} are resonant (differ by an integer)")
        if self.trace_free:
            total = sum(th.sum() for th in thetas) + tinf.sum()
            if abs(total) > 1e-9 * (1 + sum(np.abs(th).sum() for th in thetas)):
                raise ValueError("exponents are not trace-free")
        object.__setattr__(self, "mat_dim", N)
        object.__setattr__(self, "pole_count", n)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "theta_inf", tinf)


@dataclass(frozen=True, eq=False)
class SchlesingerState:
    """Pole positions with Darboux pairs ``(Q_nu, P_nu)``; arrays have shape (n, N, N)."""

    poles: np.ndarray
    q_mats: np.ndarray
    p_mats: np.ndarray

    def __post_init__(self):
        poles = np.array(self.poles, dtype=complex).reshape(-1)
        Q = np.array(self.q_mats, dtype=complex)
        P = np.array(self.p_mats, dtype=complex)
        if Q.shape != P.shape or Q.ndim != 3 or Q.shape[0] != poles.size or Q.shape[1] != Q.shape[2]:
            raise ValueError("inconsistent Schlesinger state shapes")
        for arr in (poles, Q, P):
            if not np.all(np.isfinite(arr)):
                raise ValueError("non-finite Schlesinger state")
            arr.setflags(write=False)
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "q_mats", Q)
        object.__setattr__(self, "p_mats", P)

    @property
    def pole_count(self) -> int:
        return self.poles.size

    @property
    def mat_dim(self) -> int:
        return self.q_mats.shape[1]

    def residues(self) -> np.ndarray:
        return self.q_mats @ self.p_mats

    def to_array(self) -> np.ndarray:
        return np.concatenate([self.q_mats.ravel(), self.p_mats.ravel()])

    @classmethod
    def from_array(cls, poles, arr, n: int, N: int) -> "SchlesingerState":
        m = n * N * N
        return cls(poles, np.asarray(arr[:m]).reshape(n, N, N), np.asarray(arr[m: 2 * m]).reshape(n, N, N))

    def with_poles(self, poles) -> "SchlesingerState":
        return SchlesingerState(poles, self.q_mats, self.p_mats)

    def invariant_residuals(self, model: SchlesingerModel) -> dict:
        """Spectral mismatch of each A_nu and mismatch of -sum A_nu against diag(Theta_inf)."""
        A = self.residues()
        spec = 0.0
        for nu in range(self.pole_count):
            ev = np.linalg.eigvals(A[nu])
            spec = max(spec, _spectrum_distance(ev, model.thetas[nu]))
        total = -A.sum(axis=0)
        inf = float(np.abs(total - np.diag(model.theta_inf)).max())
        return {"spectrum": spec, "theta_inf": inf}

    def validate(self, model: SchlesingerModel, tol: float = 1e-9):
        check_poles(self.poles)
        if self.pole_count != model.pole_count or self.mat_dim != model.mat_dim:
            raise ValueError("state does not match model dimensions")
        res = self.invariant_residuals(model)
        for name, r in res.items():
            if r > tol:
                raise ValueError(f"Schlesinger state invariant {name} violated ({r:.3e})")


def _spectrum_distance(ev, target) -> float:
    """Max distance after greedy matching of two small spectra."""
    ev = list(np.asarray(ev, dtype=complex))
    worst = 0.0
    for x in np.asarray(target, dtype=complex):
        j = int(np.argmin([abs(x - e) for e in ev]))
        worst = max(worst, abs(x - ev.pop(j)))
    return worst


def check_poles(poles, radius: float = POLE_GUARD):
    a = np.asarray(poles, dtype=complex)
    for i in range(a.size):
        for j in range(i + 1, a.size):
            if abs(a[i] - a[j]) <= radius:
                raise GuardError(f"poles a_{i + 1} and a_{j + 1} collide ({abs(a[i] - a[j]):.3e})")


@dataclass(frozen=True, eq=False)
class MultiTimePath:
    """Straight segments between consecutive pole-position vectors."""

    waypoints: np.ndarray

    def __post_init__(self):
        w = np.array(self.waypoints, dtype=complex)
        if w.ndim != 2 or w.shape[0] < 2:
            raise ValueError("need at least two waypoints, each a vector of pole positions")
        object.__setattr__(self, "waypoints", w)

    def check(self, radius: float, samples_per_segment: int = 64):
        for i in range(len(self.waypoints) - 1):
            a, b = self.waypoints[i], self.waypoints[i + 1]
            for s in np.linspace(0.0, 1.0, samples_per_segment + 1):
                check_poles(a + s * (b - a), radius)

    @classmethod
    def rectangle(cls, base, i: int, j: int, side: float = 0.1) -> "MultiTimePath":
        """Closed loop moving a_i then a_j by ``side`` and back."""
        base = np.array(base, dtype=complex)
        e_i = np.zeros_like(base)
        e_j = np.zeros_like(base)
        e_i[i] = side
        e_j[j] = side
        return cls([base, base + e_i, base + e_i + e_j, base + e_j, base])


def state_from_gauges(model: SchlesingerModel, poles, gauges) -> SchlesingerState:
    """``Q_nu = G_nu Theta_nu``, ``P_nu = G_nu^{-1}``; badly conditioned G_nu are rejected."""
    Q, P = [], []
    for nu, G in enumerate(gauges):
        G = np.array(G, dtype=complex)
        try:
            Gi = mat_inverse(G, max_cond=GAUGE_MAX_COND)
        except SingularMatrixError as exc:
            raise SingularMatrixError(f"gauge G_{nu + 1}: {exc}") from None
        Q.append(G @ np.diag(model.thetas[nu]))
        P.append(Gi)
    st = SchlesingerState(poles, np.array(Q), np.array(P))
    check_poles(st.poles)
    return st


def random_model_and_state(rng: np.random.Generator, mat_dim: int = 2, pole_count: int = 3, poles=None,
                           theta_scale: float = 0.5, max_tries: int = 100):
    """Random non-resonant exponents and gauges; the last residue closes ``sum A = -Theta_inf``."""
    N, n = mat_dim, pole_count
    if poles is None:
        poles = np.arange(n) * 1.0 + 0.3j * np.arange(n)
    poles = np.asarray(poles, dtype=complex)

    def cplx(*shape):
        return rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape)

    for _ in range(max_tries):
        thetas = [theta_scale * cplx(N) for _ in range(n - 1)]
        tinf = theta_scale * cplx(N)
        tinf -= tinf.mean()
        gauges = [np.eye(N) + 0.5 * cplx(N, N) for _ in range(n - 1)]
        try:
            A = [G @ np.diag(th) @ mat_inverse(G, GAUGE_MAX_COND) for G, th in zip(gauges, thetas)]
        except SingularMatrixError:
            continue
        last = -np.diag(tinf) - sum(A)
        ev, V = np.linalg.eig(last)
        try:
            model = SchlesingerModel(N, n, tuple(thetas) + (ev,), tinf, trace_free=True)
            mat_inverse(V, GAUGE_MAX_COND)
        except (ValueError, SingularMatrixError):
            continue
        state = state_from_gauges(model, poles, gauges + [V])
        state.validate(model)
        return model, state
    raise RuntimeError("could not draw a non-resonant Schlesinger model")


def _differences(poles):
    a = np.asarray(poles, dtype=complex)
    check_poles(a)
    return a[:, None] - a[None, :]


def schlesinger_hamiltonians(model: SchlesingerModel | None, state: SchlesingerState) -> np.ndarray:
    A = state.residues()
    d = _differences(state.poles)
    n = state.pole_count
    H = np.zeros(n, dtype=complex)
    for nu in range(n):
        for mu in range(n):
            if mu != nu:
                H[nu] += np.trace(A[mu] @ A[nu]) / d[nu, mu]
    return H


def schlesinger_vector_field(model: SchlesingerModel | None, state: SchlesingerState, direction: int):
    """``(dQ/da_nu, dP/da_nu)`` from Hamilton's equations of ``H_nu``."""
    A = state.residues()
    d = _differences(state.poles)
    Q, P = state.q_mats, state.p_mats
    nu = direction
    dQ = np.zeros_like(Q)
    dP = np.zeros_like(P)
    for mu in range(state.pole_count):
        if mu == nu:
            continue
        w = 1.0 / d[nu, mu]
        # term Tr(Q_mu P_mu A_nu) w: gradients A_nu Q_mu (wrt P_mu) and P_mu A_nu (wrt Q_mu)
        dQ[mu] += w * A[nu] @ Q[mu]
        dP[mu] -= w * P[mu] @ A[nu]
        # the same term seen as Tr(A_mu Q_nu P_nu) w
        dQ[nu] += w * A[mu] @ Q[nu]
        dP[nu] -= w * P[nu] @ A[mu]
    return dQ, dP


def schlesinger_residue_flow(model: SchlesingerModel | None, state: SchlesingerState, direction: int) -> np.ndarray:
    """Commutator form: dA_mu/da_nu = [A_mu, A_nu]/(a_mu - a_nu), dA_nu/da_nu = -sum of those."""
    A = state.residues()
    d = _differences(state.poles)
    nu = direction
    out = np.zeros_like(A)
    for mu in range(state.pole_count):
        if mu == nu:
            continue
        c = (A[mu] @ A[nu] - A[nu] @ A[mu]) / d[mu, nu]
        out[mu] = c
        out[nu] -= c
    return out


def schlesinger_tau_density(model: SchlesingerModel | None, state: SchlesingerState) -> np.ndarray:
    """d ln tau / da_nu for every direction (equal to H_nu)."""
    return schlesinger_hamiltonians(model, state)


def schlesinger_action_density(model: SchlesingerModel | None, state: SchlesingerState, vector_field=None) -> np.ndarray:
    """Per direction ``sum_nu Tr(P_nu dQ_nu/da_mu) - H_mu`` with dQ from the vector field."""
    vf = vector_field or schlesinger_vector_field
    H = schlesinger_hamiltonians(model, state)
    out = np.zeros(state.pole_count, dtype=complex)
    for mu in range(state.pole_count):
        dQ, _ = vf(model, state, mu)
        out[mu] = np.einsum("nij,nji->", state.p_mats, dQ) - H[mu]
    return out
