import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isotau.algebra import (
    INFINITY,
    ExponentData,
    MatrixSeries,
    build_rational,
    commutator_of,
    mat_inverse,
    residue_at,
    series_add,
    series_differentiate,
    series_inverse,
    series_mul,
    trace_of,
)
from isotau.errors import SeriesError, SingularMatrixError

from conftest import crandn

I2 = np.eye(2, dtype=complex)


def rand_series(rng, point, start, n, dim=2):
    return MatrixSeries(point, start, crandn(rng, n, dim, dim))


# --- add ----------------------------------------------------------------------

def test_add_zero_series_is_identity(rng):
    b = rand_series(rng, 0.0, -1, 4)
    z = MatrixSeries.zero(0.0, 2, -1, 2)
    assert np.allclose((z + b).coeffs, b.coeffs)


def test_add_cancellation():
    a = MatrixSeries.constant(0.5, I2)
    s = a + MatrixSeries.constant(0.5, -I2)
    assert s.max_norm() == 0.0


def test_add_truncates_to_shorter_window(rng):
    a = rand_series(rng, 0.0, 0, 4)
    b = rand_series(rng, 0.0, 0, 3)
    s = series_add(a, b)
    assert s.order == 2
    with pytest.raises(SeriesError):
        s.coeff(3)


def test_point_mismatch_rejected(rng):
    with pytest.raises(SeriesError):
        rand_series(rng, 0.0, 0, 2) + rand_series(rng, 1.0, 0, 2)
    with pytest.raises(SeriesError):
        rand_series(rng, 0.0, 0, 2) @ rand_series(rng, INFINITY, 0, 2)


# --- multiply -----------------------------------------------------------------

def test_mul_identity(rng):
    b = rand_series(rng, INFINITY, -2, 5)
    one = MatrixSeries.constant(INFINITY, I2, order=10)
    p = series_mul(one, b)
    assert p.order == b.order
    assert np.allclose(p.coeffs, b.coeffs)


def test_mul_nilpotent():
    N = np.array([[0, 1], [0, 0]], dtype=complex)
    a = MatrixSeries.from_terms(0.0, {0: I2, 1: N}, 3)
    b = MatrixSeries.from_terms(0.0, {0: I2, 1: -N}, 3)
    p = a @ b
    assert np.allclose(p.coeff(0), I2)
    assert p.max_norm(1, p.order) < 1e-15


def test_mul_single_terms(rng):
    c1, c2 = crandn(rng, 2, 2), crandn(rng, 2, 2)
    a = MatrixSeries(0.0, -1, [c1])
    b = MatrixSeries(0.0, 2, [c2])
    p = a @ b
    assert p.start == 1 and p.order == 1
    assert np.allclose(p.coeff(1), c1 @ c2)


def test_mul_window_is_pessimistic(rng):
    a = rand_series(rng, 0.0, -2, 6)   # order 3
    b = rand_series(rng, 0.0, 1, 2)    # order 2
    p = a @ b
    assert p.start == -1
    assert p.order == min(3 + 1, 2 - 2)


def test_mul_matches_evaluation(rng):
    a = rand_series(rng, 0.3, -1, 6)
    b = rand_series(rng, 0.3, 0, 6)
    z = 0.3 + 1e-3
    # both truncations agree to O(zeta^(order+1))
    assert np.allclose((a @ b).evaluate(z), a.evaluate(z) @ b.evaluate(z), atol=1e-12)


# --- inverse -------------------------------------------------------------------

def test_inverse_of_identity():
    a = MatrixSeries.constant(INFINITY, I2, order=4)
    inv = series_inverse(a, 4)
    assert np.allclose(inv.coeff(0), I2)
    assert inv.max_norm(1, 4) == 0.0


def test_inverse_geometric_series_at_infinity(rng):
    g1 = crandn(rng, 2, 2)
    a = MatrixSeries.from_terms(INFINITY, {0: I2, 1: g1}, 4)
    inv = a.inverse(4)
    expected = [I2, -g1, g1 @ g1, -g1 @ g1 @ g1, g1 @ g1 @ g1 @ g1]
    for k, m in enumerate(expected):
        assert np.allclose(inv.coeff(k), m)


def test_inverse_multiply_back(rng):
    for start in (-1, 0, 2):
        a = rand_series(rng, 0.7, start, 5 + 2 * max(start, 0) + 2)
        a = MatrixSeries(a.point, a.start, np.concatenate([[I2 + 0.3 * a.coeffs[0]], a.coeffs[1:]]))
        inv = a.inverse(5)
        prod = a @ inv
        assert abs(prod.coeff(0) - I2).max() < 1e-12
        assert prod.max_norm(1, 5) < 1e-12


def test_inverse_beyond_window_rejected(rng):
    a = rand_series(rng, 0.0, 0, 3)
    with pytest.raises(SeriesError):
        a.inverse(3)


def test_inverse_singular_leading_rejected():
    a = MatrixSeries(0.0, 0, [np.diag([1.0, 0.0]), I2])
    with pytest.raises(SingularMatrixError):
        a.inverse(1)


# --- derivative / residue ------------------------------------------------------

def test_derivative_of_constant_vanishes():
    a = MatrixSeries.constant(0.0, I2, order=3)
    assert series_differentiate(a).max_norm() == 0.0


def test_derivative_finite_point(rng):
    c = crandn(rng, 2, 2)
    d = MatrixSeries.from_terms(1.5, {2: c}, 2).derivative()
    assert np.allclose(d.coeff(1), 2 * c)


def test_derivative_at_infinity(rng):
    c = crandn(rng, 2, 2)
    d = MatrixSeries.from_terms(INFINITY, {1: c}, 1).derivative()
    assert d.start == 2
    assert np.allclose(d.coeff(2), -c)


def test_residues(rng):
    M, N, P = crandn(rng, 3, 2, 2)
    s = MatrixSeries.from_terms(0.0, {-2: M, -1: N, 0: P}, 0)
    assert np.allclose(residue_at(s), N)
    assert np.allclose(MatrixSeries.from_terms(0.0, {0: P}, 2).residue(), 0)
    assert np.allclose(MatrixSeries.from_terms(INFINITY, {1: N}, 1).residue(), -N)


@settings(max_examples=50, deadline=None)
@given(start=st.integers(-4, 1), n=st.integers(1, 6), seed=st.integers(0, 2**32 - 1),
       at_inf=st.booleans())
def test_exact_derivatives_have_no_residue(start, n, seed, at_inf):
    rng = np.random.default_rng(seed)
    point = INFINITY if at_inf else 0.25
    a = rand_series(rng, point, start, n)
    d = a.derivative()
    window_ok = (d.order >= 1) if at_inf else (d.order >= -1)
    if window_ok:
        assert np.abs(d.residue()).max() == 0.0


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), m=st.integers(0, 6))
def test_inverse_property(seed, m):
    rng = np.random.default_rng(seed)
    c = crandn(rng, m + 1, 2, 2, scale=0.3)
    c[0] += I2
    a = MatrixSeries(INFINITY, 0, c)
    p = a @ a.inverse(m)
    assert np.abs(p.coeff(0) - I2).max() < 1e-12
    assert p.max_norm(1, m) < 1e-12


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_product_associative(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (rand_series(rng, 0.0, s, 4) for s in (-1, 0, 1))
    lhs, rhs = (a @ b) @ c, a @ (b @ c)
    assert lhs.order == rhs.order
    assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-12)


# --- small helpers --------------------------------------------------------------

def test_trace_commutator_inverse(rng):
    assert trace_of(I2) == 2
    A = crandn(rng, 3, 3)
    assert np.abs(commutator_of(A, A)).max() == 0
    assert np.allclose(mat_inverse(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]))
    with pytest.raises(SingularMatrixError):
        mat_inverse(np.ones((2, 2)))


def test_exponent_data_validates_and_differentiates():
    with pytest.raises(ValueError):
        ExponentData((np.ones((2, 2)),), np.zeros((2, 2)))
    L = np.diag([0.3, -0.3])
    C = np.diag([1.0, -1.0])
    ex = ExponentData((C,), L)
    assert ex.rank == 1
    # finite point: Theta = C/zeta + L ln zeta -> Theta' = -C zeta^-2 + L zeta^-1
    d = ex.derivative(0.0, 0)
    assert np.allclose(d.coeff(-2), -C) and np.allclose(d.coeff(-1), L)
    # infinity: Theta = C z + L ln(1/z) -> d/dz = C - L/z, i.e. zeta^0 and zeta^1 terms
    d = ex.derivative(INFINITY, 1)
    assert np.allclose(d.coeff(0), C) and np.allclose(d.coeff(1), -L)


# --- rational matrices -------------------------------------------------------------

def test_rational_expansion_matches_evaluation(rng):
    R = build_rational([crandn(rng, 2, 2), crandn(rng, 2, 2)],
                       {0j: [crandn(rng, 2, 2), crandn(rng, 2, 2)], 1.5 + 0j: [crandn(rng, 2, 2)]})
    for point, z in ((0.0, 1e-3 + 2e-3j), (1.5, 1.5 + 1e-3), (0.7, 0.7 - 1e-3j), (INFINITY, 2e3 + 1e3j)):
        s = R.expand(point, 8)
        assert np.allclose(s.evaluate(z), R(z), rtol=1e-12, atol=1e-12)


def test_rational_residue_sum_vanishes(rng):
    R = build_rational([crandn(rng, 2, 2), crandn(rng, 2, 2)],
                       {0j: [crandn(rng, 2, 2), crandn(rng, 2, 2)], 1j: [crandn(rng, 2, 2)]})
    total = R.residue_at(INFINITY) + sum(R.residue_at(b) for b in R.pole_points)
    assert np.abs(total).max() < 1e-14
    series_total = R.expand(INFINITY, 2).residue() + sum(R.expand(b, 0).residue() for b in R.pole_points)
    assert np.abs(series_total).max() < 1e-13


def test_rational_dz_and_rank(rng):
    R = build_rational([crandn(rng, 2, 2), crandn(rng, 2, 2), crandn(rng, 2, 2)],
                       {0.5 + 0j: [crandn(rng, 2, 2), crandn(rng, 2, 2)]})
    z, h = 1.2 - 0.4j, 1e-6
    fd = (R(z + h) - R(z - h)) / (2 * h)
    assert np.allclose(R.dz(z), fd, atol=1e-8)
    assert R.rank_at(INFINITY) == 3
    assert R.rank_at(0.5) == 1
    assert R.rank_at(0.1) == -1
