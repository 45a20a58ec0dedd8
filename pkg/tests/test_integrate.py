import numpy as np
import pytest

from isotau.errors import GuardError, IntegrationAbort
from isotau.integrate import PathSpec, Tolerances, dense_samples, integrate_path
from isotau.sampling import draw_trajectory
from isotau.systems import ExtendedState, ThetaParams, get_system


@pytest.fixture(scope="module")
def p2_run():
    rng = np.random.default_rng(31)
    theta, st, path, res, _ = draw_trajectory("P2", rng)
    return theta, st, path, res


def test_zero_length_path():
    st = ExtendedState(q=0.3, p=-0.2, log_k=0.1)
    theta = ThetaParams(theta_inf=0.4)
    res = integrate_path("P2", theta, st, PathSpec((1.0, 1.0)))
    assert res.delta_ln_tau == 0 and res.delta_action == 0
    assert res.g_end == res.g_start
    assert res.final_state == st


def test_tolerance_validation():
    with pytest.raises(ValueError):
        Tolerances(rel_tol=0)
    with pytest.raises(ValueError):
        Tolerances(min_step=1.0, max_step=0.5)
    with pytest.raises(ValueError):
        Tolerances(method="Euler")


def test_path_validation():
    with pytest.raises(ValueError):
        PathSpec((1.0,))
    with pytest.raises(ValueError):
        PathSpec((1.0, 2.0), guard_radius=0)
    with pytest.raises(GuardError):
        integrate_path("P3", ThetaParams(0.2, 0.3), ExtendedState(q=1, p=1), PathSpec((-1.0, 1.0)))
    with pytest.raises(GuardError):
        integrate_path("P6", ThetaParams(0.2, 0.3, 0.1, 0.4), ExtendedState(q=0.5 + 1j, p=1),
                       PathSpec((0.5 - 0.5j, 1.5 + 0.5j)))


def test_p2_half_step_reference():
    theta = ThetaParams(theta_inf=0.3 - 0.1j)
    st = ExtendedState(q=0.2 + 0.1j, p=-0.3, log_k=0.05)
    path = PathSpec((1.0, 2.0))
    a = integrate_path("P2", theta, st, path)
    b = integrate_path("P2", theta, st, path, Tolerances().scaled(0.5))
    assert np.abs(a.ys[-1] - b.ys[-1]).max() < 1e-8


def test_p1_tau_against_independent_quadrature():
    rng = np.random.default_rng(33)
    theta, st, path, res, _ = draw_trajectory("P1", rng, length=0.5)
    sysm = get_system("P1")
    x, w = np.polynomial.legendre.leggauss(60)
    total = 0j
    dt = path.waypoints[1] - path.waypoints[0]
    # composite Gauss-Legendre on the accepted-step partition
    for s0, s1 in zip(res.sigmas[:-1], res.sigmas[1:]):
        sig = s0 + (x + 1) * (s1 - s0) / 2
        vals = [2 * sysm.hamiltonian(theta, res.state_at(s), res.t_at(s)) for s in sig]
        total += np.dot(w, vals) * (s1 - s0) / 2 * dt
    assert abs(total - res.delta_ln_tau) < 1e-8


def test_action_accumulator_matches_quadrature(p2_run):
    theta, st, path, res = p2_run
    sysm = get_system("P2")
    x, w = np.polynomial.legendre.leggauss(40)
    dt = path.waypoints[1] - path.waypoints[0]
    total = 0j
    for s0, s1 in zip(res.sigmas[:-1], res.sigmas[1:]):
        sig = s0 + (x + 1) * (s1 - s0) / 2
        vals = [sysm.density_breakdown(theta, res.state_at(s), res.t_at(s)).action_density for s in sig]
        total += np.dot(w, vals) * (s1 - s0) / 2 * dt
    assert abs(total - res.delta_action) < 1e-8


def test_dense_samples(p2_run):
    theta, st, path, res = p2_run
    two = dense_samples(res, 2)
    assert len(two) == 2
    assert two[0][0] == 0.0 and two[-1][0] == 1.0
    assert np.array_equal(two[-1][3], res.ys[-1])
    stored = dense_samples(res, len(res.sigmas))
    assert all(np.array_equal(a[3], b) for a, b in zip(stored, res.ys))
    many = dense_samples(res, 17)
    assert np.all(np.diff([s[0] for s in many]) > 0)
    for sig, t, state, y in many[5:8]:
        ref = integrate_path("P2", theta, st, PathSpec((path.waypoints[0], t)), Tolerances(1e-13, 1e-15))
        assert np.abs(ref.ys[-1] - y).max() < 1e-8
    with pytest.raises(ValueError):
        dense_samples(res, 1)


def test_samples_ordered_and_shared_steps(p2_run):
    _, _, path, res = p2_run
    assert np.all(np.diff(res.sigmas) > 0)
    assert len(res.samples) == len(res.sigmas) == res.step_stats.accepted + 1
    assert res.ys.shape[1] == res.state_dim + 2


def test_deterministic():
    theta = ThetaParams(theta0=0.3, theta_inf=-0.2 + 0.1j)
    st = ExtendedState(q=0.7 + 0.2j, p=0.4, log_k=0.1, log_a=-0.2)
    path = PathSpec((1.0, 1.5 + 0.5j, 2.0))
    a = integrate_path("P4", theta, st, path)
    b = integrate_path("P4", theta, st, path)
    assert np.array_equal(a.ys, b.ys) and a.delta_ln_tau == b.delta_ln_tau


def test_rk45_agrees_with_dop853(p2_run):
    theta, st, path, res = p2_run
    r = integrate_path("P2", theta, st, path, Tolerances(method="RK45"))
    assert abs(r.delta_ln_tau - res.delta_ln_tau) < 1e-7
    assert r.step_stats.accepted > res.step_stats.accepted


def test_multi_segment_complex_path_matches_straight_sum():
    theta = ThetaParams(theta_inf=0.25)
    st = ExtendedState(q=0.1, p=0.2)
    bent = integrate_path("P2", theta, st, PathSpec((0.0, 0.3 + 0.3j, 0.6)))
    first = integrate_path("P2", theta, st, PathSpec((0.0, 0.3 + 0.3j)))
    second = integrate_path("P2", theta, first.final_state, PathSpec((0.3 + 0.3j, 0.6)))
    assert abs(bent.delta_ln_tau - first.delta_ln_tau - second.delta_ln_tau) < 1e-10
    straight = integrate_path("P2", theta, st, PathSpec((0.0, 0.6)))
    # no pole between the two routes: analytic continuation agrees
    assert np.abs(straight.ys[-1] - bent.ys[-1]).max() < 1e-8


def test_movable_pole_aborts_with_last_good_time():
    theta = ThetaParams(theta_inf=0.0)
    st = ExtendedState(q=5.0, p=0.0)
    with pytest.raises(IntegrationAbort) as exc:
        integrate_path("P2", theta, st, PathSpec((0.0, 1.0)))
    assert exc.value.last_t is not None and 0 < exc.value.last_t.real < 1


def test_rejected_steps_counted():
    theta = ThetaParams(theta_inf=0.1)
    st = ExtendedState(q=1.5, p=0.0)
    res = integrate_path("P2", theta, st, PathSpec((0.0, 0.3)), Tolerances(max_step=0.5))
    assert res.step_stats.nfev >= 12 * (res.step_stats.accepted + res.step_stats.rejected)


def test_derivative_of_dense_output(p2_run):
    theta, st, path, res = p2_run
    sysm = get_system("P2")
    for sig in (0.1, 0.45, 0.9):
        d = res.derivative(sig)
        ref = sysm.vector_field_array(theta, res.y_at(sig)[:3], res.t_at(sig))
        assert np.abs(d[:3] - ref).max() < 1e-6
