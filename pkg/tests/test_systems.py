
import numpy as np
import pytest

from isotau.algebra import INFINITY
from isotau.errors import GuardError, OrderError
from isotau.sampling import sample_point
from isotau.systems import (
    KINDS,
    PAIRED_THETA,
    SIGMA3,
    ExtendedState,
    PainleveKind,
    ThetaParams,
    density_breakdown,
    get_system,
    hamiltonian,
    system_spec,
    vector_field,
)

I2 = np.eye(2)


def points(kind, n, seed):
    rng = np.random.default_rng(seed)
    return [sample_point(kind, rng) for _ in range(n)]


# --- hand-evaluated examples ------------------------------------------------------

def test_hamiltonian_examples():
    assert hamiltonian("P2", ThetaParams(theta_inf=0.4), ExtendedState(q=0, p=0), 1.3) == 0
    assert hamiltonian("P1", ThetaParams(), ExtendedState(q=1, p=2), 3) == -3
    assert hamiltonian("P2", ThetaParams(theta_inf=3), ExtendedState(q=1, p=2), 0) == 7


def test_vector_field_examples():
    d = vector_field("P2", ThetaParams(theta_inf=1), ExtendedState(q=0, p=0), 0)
    assert (d.q, d.p, d.log_k) == (0, -1, 0)
    d = vector_field("P1", ThetaParams(), ExtendedState(q=0, p=0), 0)
    assert (d.q, d.p) == (0, 0)
    d = vector_field("P2", ThetaParams(), ExtendedState(q=1, p=0), 2)
    assert (d.q, d.p, d.log_k) == (2, 0, -1)


def test_density_examples():
    b = density_breakdown("P4", ThetaParams(), ExtendedState(q=2, p=0), 0)
    assert b.hamiltonian == -2 and b.tau_density == -1
    b = density_breakdown("P1", ThetaParams(), ExtendedState(q=1, p=2), 3)
    assert b.tau_density == -6
    b = density_breakdown("P2", ThetaParams(theta_inf=0.8), ExtendedState(q=0, p=0), 0)
    assert b.g_value == 0


def test_scalar_equation_examples():
    alpha = 0.3
    assert get_system("P2").painleve_residual(ThetaParams(theta_inf=0.5 - alpha), 0, 1.7, alpha, 0) == 0
    assert get_system("P1").painleve_residual(ThetaParams(), 0, 0.4, 0.9, 0.9) == 0


def test_specs_and_gamma():
    assert system_spec("P1").gamma == 2
    assert all(system_spec(k).gamma == 1 for k in KINDS[1:])
    assert system_spec("P6").singular_times == (0j, 1 + 0j)
    assert get_system(PainleveKind.P3) is get_system("P3") is get_system(system_spec("P3"))
    with pytest.raises(ValueError):
        get_system("P7")


def test_scalar_coefficient_dictionaries():
    c = get_system("P6").scalar_coefficients(ThetaParams(1, 2, 3, 4))
    assert c == {"alpha": 24.5, "beta": -2, "gamma": 8, "delta": -17.5}
    assert get_system("P2").scalar_coefficients(ThetaParams(theta_inf=0.2))["alpha"] == pytest.approx(0.3)


# --- guards ----------------------------------------------------------------------

@pytest.mark.parametrize("kind,theta,state,t", [
    ("P3", ThetaParams(), ExtendedState(q=1, p=1), 0),
    ("P4", ThetaParams(theta0=0.3), ExtendedState(q=0, p=1), 1),
    ("P5", ThetaParams(0.2, 0.3), ExtendedState(q=0.5, p=1), 0),
    ("P6", ThetaParams(0.2, 0.3, 0.1, 0.4), ExtendedState(q=0.5, p=1), 1),
    ("P6", ThetaParams(0.2, 0.3, 0.1, 0.4), ExtendedState(q=0.5, p=1), 0.5),
])
def test_guards(kind, theta, state, t):
    with pytest.raises(GuardError):
        hamiltonian(kind, theta, state, t)


def test_p6_degenerate_theta_inf_rejected():
    st = ExtendedState(q=0.3 + 0.2j, p=0.7)
    with pytest.raises(GuardError):
        get_system("P6").a_matrix(ThetaParams(0.2, 0.3, 0.1, 0.0), st, 0.5 + 0.5j)


def test_frame_order_cap():
    theta, st, t = points("P2", 1, 0)[0]
    with pytest.raises(OrderError):
        get_system("P2").local_frames(theta, st, t, order=4)
    fr = get_system("P2").local_frames(theta, st, t, order=2)
    assert fr[0].order == 2


# --- Hamilton structure -------------------------------------------------------------

def _fd(f, x, h):
    return (f(x + h) - f(x - h)) / (2 * h)


@pytest.mark.parametrize("kind", KINDS)
def test_hamilton_equations_by_finite_differences(kind):
    sysm = get_system(kind)
    for theta, st, t in points(kind, 10, 1):
        H = lambda th, s: sysm.hamiltonian(th, s, t)
        d = sysm.vector_field(theta, st, t)
        h = lambda x: 1e-6 * max(1, abs(x))
        assert abs(d.q - _fd(lambda x: H(theta, st.with_(p=x)), st.p, h(st.p))) < 1e-6
        assert abs(d.p + _fd(lambda x: H(theta, st.with_(q=x)), st.q, h(st.q))) < 1e-6
        for slot in sysm.layout[2:]:
            name = PAIRED_THETA[slot]
            g = _fd(lambda x: H(theta.with_(**{name: x}), st), theta.get(name), h(theta.get(name)))
            assert abs(d.get(slot) + g) < 1e-6, slot


def test_p2_gauge_log_derivative_is_minus_q():
    theta, st, t = points("P2", 1, 2)[0]
    assert vector_field("P2", theta, st, t).log_k == -st.q


@pytest.mark.parametrize("kind", KINDS)
def test_scalar_equation_from_vector_field(kind):
    """q_tt as the directional derivative of q_dot along the flow (Cauchy contour, 32 nodes)."""
    sysm = get_system(kind)
    lay = sysm.layout
    for theta, st, t in points(kind, 5, 3):
        y = st.to_array(lay)
        dy = sysm.vector_field_array(theta, y, t)
        f = lambda s: sysm.vector_field_array(theta, y + s * dy, t + s)[0]
        rho = 1e-2 / (1 + np.abs(dy).max())
        w = np.exp(2j * np.pi * np.arange(32) / 32)
        qdd = np.mean([f(rho * x) / x for x in w]) / rho
        r = sysm.painleve_residual(theta, st.q, dy[0], qdd, t)
        assert abs(r) < 1e-10 * max(1, abs(qdd))


# --- Lax matrices --------------------------------------------------------------------

@pytest.mark.parametrize("kind", KINDS)
def test_a_is_traceless(kind):
    rng = np.random.default_rng(4)
    for theta, st, t in points(kind, 5, 4):
        A = get_system(kind).a_matrix(theta, st, t)
        for _ in range(4):
            z = 3 * (rng.standard_normal() + 1j * rng.standard_normal())
            assert abs(np.trace(A(z))) < 1e-12 * max(1, np.abs(A(z)).max())


def test_p2_leading_coefficient():
    theta, st, t = points("P2", 1, 5)[0]
    A = get_system("P2").a_matrix(theta, st, t)
    assert np.allclose(A.poly[2], SIGMA3)


def test_p6_entry_12():
    for theta, st, t in points("P6", 5, 6):
        A = get_system("P6").a_matrix(theta, st, t)
        z = 0.37 - 1.2j
        assert abs(A(z)[0, 1] - st.k * (z - st.q) / (z * (z - 1) * (z - t))) < 1e-10


def test_p6_residue_sum_and_constraints():
    sysm = get_system("P6")
    for theta, st, t in points("P6", 20, 7):
        a0, a1, at = sysm.residues(theta, st, t)
        assert np.abs(a0 + a1 + at + theta.theta_inf * SIGMA3).max() < 1e-10
        prm = sysm.residue_params(theta, st, t)
        for r in prm.constraint_residuals(theta, st.q, t).values():
            assert abs(r) < 1e-10


def _eig_match(m, val):
    ev = np.sort_complex(np.linalg.eigvals(m))
    ref = np.sort_complex(np.array([val, -val]))
    return np.abs(ev - ref).max()


def test_designated_residue_eigenvalues():
    for theta, st, t in points("P3", 10, 8):
        A = get_system("P3").a_matrix(theta, st, t)
        m2 = dict(A.poles)[0j][1]
        assert _eig_match(m2, t / 2) < 1e-9
    for theta, st, t in points("P4", 10, 9):
        A = get_system("P4").a_matrix(theta, st, t)
        assert _eig_match(A.residue_at(0.0), theta.theta0) < 1e-9
    for theta, st, t in points("P5", 10, 10):
        A = get_system("P5").a_matrix(theta, st, t)
        assert _eig_match(A.residue_at(0.0), theta.theta0) < 1e-9
        assert _eig_match(A.residue_at(1.0), theta.theta1) < 1e-9
    for theta, st, t in points("P6", 10, 11):
        A = get_system("P6").a_matrix(theta, st, t)
        assert _eig_match(A.residue_at(0.0), theta.theta0) < 1e-9
        assert _eig_match(A.residue_at(1.0), theta.theta1) < 1e-9
        assert _eig_match(A.residue_at(t), theta.theta_t) < 1e-9


@pytest.mark.parametrize("kind", KINDS)
def test_a_matrix_residue_sum_vanishes(kind):
    for theta, st, t in points(kind, 5, 12):
        A = get_system(kind).a_matrix(theta, st, t)
        total = A.residue_at(INFINITY) + sum(A.residue_at(b) for b in A.pole_points)
        assert np.abs(total).max() < 1e-12


# --- local frames -----------------------------------------------------------------------

def test_frame_inventory():
    theta, st, t = points("P1", 1, 13)[0]
    fr = get_system("P1").local_frames(theta, st, t)
    assert [f.location for f in fr] == [INFINITY] and fr[0].order == 5
    theta, st, t = points("P2", 1, 13)[0]
    assert [f.order for f in get_system("P2").local_frames(theta, st, t)] == [3]
    theta, st, t = points("P6", 1, 13)[0]
    fr = get_system("P6").local_frames(theta, st, t)
    locs = [f.location for f in fr]
    assert 0j in locs and 1 + 0j in locs and any(abs(x - t) < 1e-15 for x in locs if x is not INFINITY)
    assert [f.order for f in fr if f.location is not INFINITY and abs(f.location - t) < 1e-15] == [1]


def test_p2_g1_diagonal_is_minus_h():
    for theta, st, t in points("P2", 5, 14):
        g1 = get_system("P2").local_frames(theta, st, t)[0].series_coeffs[0]
        assert abs(g1[0, 0] + hamiltonian("P2", theta, st, t)) < 1e-13


def test_p1_g1_is_diagonal():
    for theta, st, t in points("P1", 5, 15):
        g1 = get_system("P1").local_frames(theta, st, t)[0].series_coeffs[0]
        assert g1[0, 1] == 0 and g1[1, 0] == 0


def test_p3_gauge_diagonalizes_leading_term():
    for theta, st, t in points("P3", 5, 16):
        sysm = get_system("P3")
        A = sysm.a_matrix(theta, st, t)
        g = sysm.gauge_zero(theta, st, t)
        m2 = dict(A.poles)[0j][1]
        assert np.abs(g @ np.diag([-t / 2, t / 2]) @ np.linalg.inv(g) - m2).max() < 1e-10


def _theta_prime(exponent, point, z):
    """Derivative of the formal exponent evaluated directly in z."""
    L = exponent.log_coeff
    out = np.zeros((2, 2), dtype=complex)
    if point is INFINITY:
        for j, c in enumerate(exponent.polar_coeffs):
            out += (j + 1) * c * z ** j
        return out - L / z
    zeta = z - point
    for j, c in enumerate(exponent.polar_coeffs):
        out += -(j + 1) * c * zeta ** (-(j + 2))
    return out + L / zeta


def contour_residuals(A, frame, rho=0.2, n=128):
    """Laurent coefficients of A~ G^ - G^' - G^ Theta' by a trapezoid contour integral.

    Independent of the series algebra: only pointwise evaluations of A, the
    frame polynomial and the exponent derivative are used.
    """
    loc = frame.location
    g = frame.gauge
    gi = np.linalg.inv(g)
    r = A.rank_at(loc)
    K = frame.order
    lead = (r - 1) if loc is INFINITY else (r + 1)
    zetas = rho * np.exp(2j * np.pi * np.arange(n) / n)
    vals = []
    for ze in zetas:
        z = 1 / ze if loc is INFINITY else loc + ze
        Gh = np.eye(2, dtype=complex) + sum(c * ze ** (i + 1) for i, c in enumerate(frame.series_coeffs))
        if loc is INFINITY:
            dG = sum(-(i + 1) * c * z ** (-(i + 2)) for i, c in enumerate(frame.series_coeffs))
        else:
            dG = sum((i + 1) * c * ze ** i for i, c in enumerate(frame.series_coeffs))
        R = gi @ A(z) @ g @ Gh - dG - Gh @ _theta_prime(frame.exponent, loc, z)
        vals.append(R * ze ** lead)
    C = np.fft.fft(np.array(vals), axis=0) / n
    full = max(float(np.abs(C[k] / rho ** k).max()) for k in range(K + 1))
    diag = float(np.abs(np.diag(C[K + 1] / rho ** (K + 1))).max()) if r >= 1 else 0.0
    return full, diag


@pytest.mark.parametrize("kind", KINDS)
def test_series_recursion_against_contour_oracle(kind):
    from isotau.verify import series_recursion_residuals

    sysm = get_system(kind)
    for theta, st, t in points(kind, 4, 17):
        A = sysm.a_matrix(theta, st, t)
        frames = sysm.local_frames(theta, st, t)
        algebraic = series_recursion_residuals(kind, theta, st, t, frames)
        for fr, alg in zip(frames, algebraic):
            full, diag = contour_residuals(A, fr)
            scale = max(1.0, np.abs(fr.gauge).max() ** 2) * (1 + max((np.abs(c).max() for c in fr.series_coeffs),
                                                                   default=0)) ** 2
            assert full < 1e-8 * scale and diag < 1e-8 * scale
            assert alg["residual"] < 1e-9


def test_gauge_principal_branch_sign_irrelevant():
    """Flipping the gauge sign leaves the recursion residual unchanged."""
    from isotau.systems.base import LocalFrame
    from isotau.verify import series_recursion_residuals

    theta, st, t = points("P5", 1, 18)[0]
    frames = get_system("P5").local_frames(theta, st, t)
    flipped = [LocalFrame(f.location, -f.gauge, f.series_coeffs, f.exponent) for f in frames]
    a = series_recursion_residuals("P5", theta, st, t, frames)
    b = series_recursion_residuals("P5", theta, st, t, flipped)
    assert all(x["residual"] < 1e-12 and y["residual"] < 1e-12 for x, y in zip(a, b))
