"""Complex matrix helpers, truncated matrix power series and rational matrices.

A :class:`MatrixSeries` stores ``sum_k C_k zeta**k`` for ``k`` in the closed
window ``[start, order]``.  At a finite point ``zeta = z - point``; at
infinity ``zeta = 1/z``.  Everything beyond ``order`` is unknown, and every
operation narrows the window so that no unknown coefficient leaks into a
reported one.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence, Union

import numpy as np

from .errors import SeriesError, SingularMatrixError

__all__ = [
    "INFINITY",
    "Point",
    "MatrixSeries",
    "ExponentData",
    "RationalMatrix",
    "as_matrix",
    "identity",
    "trace_of",
    "commutator_of",
    "mat_inverse",
    "series_add",
    "series_mul",
    "series_inverse",
    "series_differentiate",
    "residue_at",
    "same_point",
]

MAX_COND = 1e12


class _Infinity:
    """The point at infinity of the Riemann sphere (singleton)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()
Point = Union[complex, _Infinity]


def same_point(a: Point, b: Point, tol: float = 1e-13) -> bool:
    if a is INFINITY or b is INFINITY:
        return a is b
    return abs(complex(a) - complex(b)) <= tol * (1.0 + abs(complex(a)))


def _norm_point(point) -> Point:
    if point is INFINITY:
        return INFINITY
    z = complex(point)
    if not np.isfinite(z):
        raise SeriesError(f"non-finite expansion point {point!r}")
    return z


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite square complex array (copy)."""
    a = np.array(m, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def trace_of(m) -> complex:
    return complex(np.trace(np.asarray(m, dtype=complex)))


def commutator_of(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return a @ b - b @ a


def mat_inverse(m, max_cond: float = MAX_COND) -> np.ndarray:
    """Inverse with a condition-number guard."""
    a = as_matrix(m)
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > max_cond:
        raise SingularMatrixError(f"matrix condition number {cond:.3e} exceeds {max_cond:.1e}")
    return np.linalg.inv(a)


@dataclass(frozen=True, eq=False)
class MatrixSeries:
    """Truncated Laurent series ``sum_k coeffs[k - start] * zeta**k``."""

    point: Point
    start: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim == 2:
            c = c[None]
        if c.ndim != 3 or c.shape[1] != c.shape[2] or c.shape[1] < 1:
            raise SeriesError(f"coefficients must have shape (n, d, d), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise SeriesError("series has non-finite coefficients")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "point", _norm_point(self.point))
        object.__setattr__(self, "start", int(self.start))

    # construction helpers
    @classmethod
    def from_terms(cls, point, terms: dict, order: int, dim: int | None = None) -> "MatrixSeries":
        """Build from ``{exponent: matrix}``; exponents above ``order`` are an error."""
        if dim is None:
            dim = as_matrix(next(iter(terms.values()))).shape[0]
        start = min(terms) if terms else order + 1
        if terms and max(terms) > order:
            raise SeriesError("term beyond requested truncation order")
        start = min(start, order + 1)
        c = np.zeros((order - start + 1, dim, dim), dtype=complex)
        for e, m in terms.items():
            c[e - start] = as_matrix(m)
        return cls(point, start, c) if c.shape[0] else cls.empty(point, dim, start)

    @classmethod
    def empty(cls, point, dim: int, start: int) -> "MatrixSeries":
        """A series with an empty window (order = start - 1)."""
        s = cls.__new__(cls)
        object.__setattr__(s, "point", _norm_point(point))
        object.__setattr__(s, "start", int(start))
        c = np.zeros((0, dim, dim), dtype=complex)
        c.setflags(write=False)
        object.__setattr__(s, "coeffs", c)
        return s

    @classmethod
    def constant(cls, point, m, order: int = 0) -> "MatrixSeries":
        m = as_matrix(m)
        return cls.from_terms(point, {0: m}, order)

    @classmethod
    def zero(cls, point, dim: int, start: int, order: int) -> "MatrixSeries":
        if order < start:
            return cls.empty(point, dim, start)
        return cls(point, start, np.zeros((order - start + 1, dim, dim), dtype=complex))

    # basic properties
    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def order(self) -> int:
        """Truncation order: highest exponent whose coefficient is known."""
        return self.start + self.coeffs.shape[0] - 1

    @property
    def at_infinity(self) -> bool:
        return self.point is INFINITY

    def coeff(self, k: int) -> np.ndarray:
        if k > self.order:
            raise SeriesError(f"exponent {k} outside truncation window (order {self.order})")
        if k < self.start:
            return np.zeros((self.dim, self.dim), dtype=complex)
        return self.coeffs[k - self.start].copy()

    def truncate(self, order: int) -> "MatrixSeries":
        if order > self.order:
            raise SeriesError(f"cannot extend truncation order {self.order} to {order}")
        if order < self.start:
            return MatrixSeries.empty(self.point, self.dim, self.start)
        return MatrixSeries(self.point, self.start, self.coeffs[: order - self.start + 1])

    def max_norm(self, lo: int | None = None, hi: int | None = None) -> float:
        """Largest entry modulus over exponents in [lo, hi] (clipped to the window)."""
        lo = self.start if lo is None else max(lo, self.start)
        hi = self.order if hi is None else min(hi, self.order)
        if hi < lo:
            return 0.0
        return float(np.abs(self.coeffs[lo - self.start: hi - self.start + 1]).max())

    def evaluate(self, z: complex) -> np.ndarray:
        """Sum of the stored terms at the coordinate ``z``."""
        zeta = 1.0 / z if self.at_infinity else z - self.point
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for i, c in enumerate(self.coeffs):
            out += c * zeta ** (self.start + i)
        return out

    def _check_compatible(self, other: "MatrixSeries"):
        if not isinstance(other, MatrixSeries):
            raise SeriesError("operand is not a MatrixSeries")
        if not same_point(self.point, other.point, tol=0.0):
            raise SeriesError(f"expansion points differ: {self.point!r} vs {other.point!r}")
        if self.dim != other.dim:
            raise SeriesError(f"dimensions differ: {self.dim} vs {other.dim}")

    # arithmetic
    def __add__(self, other: "MatrixSeries") -> "MatrixSeries":
        self._check_compatible(other)
        start = min(self.start, other.start)
        order = min(self.order, other.order)
        if order < start:
            return MatrixSeries.empty(self.point, self.dim, start)
        out = np.zeros((order - start + 1, self.dim, self.dim), dtype=complex)
        for s in (self, other):
            hi = min(s.order, order)
            if hi >= s.start:
                out[s.start - start: hi - start + 1] += s.coeffs[: hi - s.start + 1]
        return MatrixSeries(self.point, start, out)

    def __neg__(self) -> "MatrixSeries":
        if not self.coeffs.shape[0]:
            return self
        return MatrixSeries(self.point, self.start, -self.coeffs)

    def __sub__(self, other: "MatrixSeries") -> "MatrixSeries":
        return self + (-other)

    def scale(self, c: complex) -> "MatrixSeries":
        if not self.coeffs.shape[0]:
            return self
        return MatrixSeries(self.point, self.start, complex(c) * self.coeffs)

    def __matmul__(self, other: "MatrixSeries") -> "MatrixSeries":
        self._check_compatible(other)
        start = self.start + other.start
        order = min(self.order + other.start, other.order + self.start)
        if order < start:
            return MatrixSeries.empty(self.point, self.dim, start)
        n = order - start + 1
        out = np.zeros((n, self.dim, self.dim), dtype=complex)
        na, nb = self.coeffs.shape[0], other.coeffs.shape[0]
        for i in range(min(na, n)):
            jmax = min(nb, n - i)
            if jmax > 0:
                out[i: i + jmax] += np.einsum("ij,njk->nik", self.coeffs[i], other.coeffs[:jmax])
        return MatrixSeries(self.point, start, out)

    def inverse(self, order: int) -> "MatrixSeries":
        """Series ``b`` with ``self @ b = I`` through exponent ``order``."""
        if not self.coeffs.shape[0]:
            raise SeriesError("cannot invert an empty series")
        s = self.start
        c0inv = mat_inverse(self.coeffs[0])
        avail = self.order - 2 * s
        if order > avail:
            raise SeriesError(f"inverse order {order} exceeds available window (max {avail})")
        n = order + s + 1
        if n <= 0:
            return MatrixSeries.empty(self.point, self.dim, -s)
        d = np.zeros((n, self.dim, self.dim), dtype=complex)
        d[0] = c0inv
        for m in range(1, n):
            acc = np.zeros((self.dim, self.dim), dtype=complex)
            for j in range(1, m + 1):
                acc += self.coeffs[j] @ d[m - j]
            d[m] = -c0inv @ acc
        return MatrixSeries(self.point, -s, d)

    def derivative(self) -> "MatrixSeries":
        """Termwise d/dz (with the chain rule d zeta/dz = -zeta**2 at infinity)."""
        e = np.arange(self.start, self.order + 1)
        if self.at_infinity:
            new_start = self.start + 1
            factors = -e
        else:
            new_start = self.start - 1
            factors = e
        if not self.coeffs.shape[0]:
            return MatrixSeries.empty(self.point, self.dim, new_start)
        return MatrixSeries(self.point, new_start, factors[:, None, None] * self.coeffs)

    def residue(self) -> np.ndarray:
        """Residue in z: coefficient of 1/(z-a), or minus the coefficient of 1/z at infinity."""
        if self.at_infinity:
            if self.order < 1:
                raise SeriesError("residue at infinity needs the zeta**1 coefficient")
            return -self.coeff(1)
        if self.order < -1:
            raise SeriesError("residue needs the zeta**-1 coefficient")
        return self.coeff(-1)

    def conjugated(self, g) -> "MatrixSeries":
        """Coefficientwise ``g^{-1} C_k g``."""
        g = as_matrix(g)
        gi = mat_inverse(g)
        if not self.coeffs.shape[0]:
            return self
        return MatrixSeries(self.point, self.start, np.einsum("ij,njk,kl->nil", gi, self.coeffs, g))


def series_add(a: MatrixSeries, b: MatrixSeries) -> MatrixSeries:
    return a + b


def series_mul(a: MatrixSeries, b: MatrixSeries) -> MatrixSeries:
    return a @ b


def series_inverse(a: MatrixSeries, order: int) -> MatrixSeries:
    return a.inverse(order)


def series_differentiate(a: MatrixSeries) -> MatrixSeries:
    return a.derivative()


def residue_at(a: MatrixSeries) -> np.ndarray:
    return a.residue()


def _is_diagonal(m: np.ndarray) -> bool:
    return bool(np.all(m[~np.eye(m.shape[0], dtype=bool)] == 0))


@dataclass(frozen=True, eq=False)
class ExponentData:
    """Diagonal exponent ``Theta(zeta) = sum_j polar[j] zeta**-(j+1) + log_coeff * ln zeta``.

    ``zeta`` is the local variable of the point (``1/z`` at infinity).  With this
    convention ``log_coeff`` is the formal monodromy exponent at every point.
    """

    polar_coeffs: tuple
    log_coeff: np.ndarray

    def __post_init__(self):
        polar = tuple(as_matrix(m) for m in self.polar_coeffs)
        log = as_matrix(self.log_coeff)
        for m in polar + (log,):
            if m.shape != log.shape:
                raise ValueError("exponent matrices must share one dimension")
            if not _is_diagonal(m):
                raise ValueError("exponent matrices must be diagonal")
            m.setflags(write=False)
        object.__setattr__(self, "polar_coeffs", polar)
        object.__setattr__(self, "log_coeff", log)

    @property
    def rank(self) -> int:
        return len(self.polar_coeffs)

    @property
    def dim(self) -> int:
        return self.log_coeff.shape[0]

    def derivative(self, point, order: int) -> MatrixSeries:
        """dTheta/dz as a series at ``point``; exact terms, zero-padded up to ``order``."""
        terms = {}
        if point is INFINITY:
            # d/dz zeta**k = -k zeta**(k+1), d/dz ln zeta = -zeta
            for j, c in enumerate(self.polar_coeffs):
                k = -(j + 1)
                terms[k + 1] = terms.get(k + 1, 0) + (-k) * c
            terms[1] = terms.get(1, 0) - self.log_coeff
        else:
            for j, c in enumerate(self.polar_coeffs):
                k = -(j + 1)
                terms[k - 1] = terms.get(k - 1, 0) + k * c
            terms[-1] = terms.get(-1, 0) + self.log_coeff
        terms = {e: m for e, m in terms.items() if e <= order}
        lo = min(terms) if terms else order + 1
        if not terms:
            return MatrixSeries.empty(point, self.dim, order + 1)
        terms.setdefault(order, np.zeros_like(self.log_coeff))
        out = MatrixSeries.from_terms(point, terms, order, self.dim)
        assert out.start == lo
        return out


@dataclass(frozen=True, eq=False)
class RationalMatrix:
    """Matrix rational function in partial fractions.

    ``R(z) = sum_j poly[j] z**j + sum_b sum_j M_{b,j} (z - b)**-(j+1)``; ``poles`` is a
    tuple of ``(b, array of M_{b,j})``.
    """

    poly: np.ndarray
    poles: tuple = ()

    def __post_init__(self):
        poly = np.array(self.poly, dtype=complex)
        if poly.ndim == 2:
            poly = poly[None]
        poles = []
        for b, ms in self.poles:
            ms = np.array(ms, dtype=complex)
            if ms.ndim == 2:
                ms = ms[None]
            ms.setflags(write=False)
            poles.append((complex(b), ms))
        poly.setflags(write=False)
        object.__setattr__(self, "poly", poly)
        object.__setattr__(self, "poles", tuple(poles))

    @property
    def dim(self) -> int:
        return self.poly.shape[1]

    @property
    def pole_points(self) -> list:
        return [b for b, _ in self.poles]

    def _poly_degree(self) -> int:
        nz = [j for j in range(self.poly.shape[0]) if np.any(self.poly[j] != 0)]
        return max(nz) if nz else -1

    def rank_at(self, point) -> int:
        """Poincare rank of ``dPhi/dz = R Phi`` at ``point`` (0 for Fuchsian)."""
        if point is INFINITY:
            return self._poly_degree() + 1
        for b, ms in self.poles:
            if same_point(b, point):
                return ms.shape[0] - 1
        return -1

    def _check_z(self, z):
        for b, _ in self.poles:
            if abs(z - b) < 1e-12 * (1 + abs(b)):
                raise SeriesError(f"evaluation at pole {b}")

    def __call__(self, z: complex) -> np.ndarray:
        z = complex(z)
        self._check_z(z)
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for j in range(self.poly.shape[0] - 1, -1, -1):
            out = out * z + self.poly[j]
        for b, ms in self.poles:
            w = 1.0 / (z - b)
            for j, m in enumerate(ms):
                out = out + m * w ** (j + 1)
        return out

    def dz(self, z: complex) -> np.ndarray:
        """Analytic z-derivative."""
        z = complex(z)
        self._check_z(z)
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for j in range(1, self.poly.shape[0]):
            out = out + j * self.poly[j] * z ** (j - 1)
        for b, ms in self.poles:
            w = 1.0 / (z - b)
            for j, m in enumerate(ms):
                out = out - (j + 1) * m * w ** (j + 2)
        return out

    def residue_at(self, point) -> np.ndarray:
        if point is INFINITY:
            out = np.zeros((self.dim, self.dim), dtype=complex)
            for _, ms in self.poles:
                out -= ms[0]
            return out
        for b, ms in self.poles:
            if same_point(b, point):
                return ms[0].copy()
        return np.zeros((self.dim, self.dim), dtype=complex)

    def conjugated(self, g) -> "RationalMatrix":
        """``g^{-1} R(z) g``."""
        g = as_matrix(g)
        gi = mat_inverse(g)
        conj = lambda arr: np.einsum("ij,njk,kl->nil", gi, arr, g)
        return RationalMatrix(conj(self.poly), tuple((b, conj(ms)) for b, ms in self.poles))

    def expand(self, point, order: int) -> MatrixSeries:
        """Exact Laurent expansion at ``point`` through exponent ``order``."""
        d = self.dim
        if point is INFINITY:
            deg = self._poly_degree()
            start = -deg if deg >= 0 else 1
            if order < start:
                return MatrixSeries.empty(INFINITY, d, start)
            c = np.zeros((order - start + 1, d, d), dtype=complex)
            for j in range(max(deg, -1) + 1):
                if -j <= order:
                    c[-j - start] += self.poly[j]
            for b, ms in self.poles:
                for jj, m in enumerate(ms):
                    mult = jj + 1
                    # (z-b)^-m = zeta^m (1 - b zeta)^-m
                    for n in range(0, order - mult + 1):
                        c[mult + n - start] += comb(mult + n - 1, n) * b**n * m
            return MatrixSeries(INFINITY, start, c)

        a = complex(point)
        own = None
        for b, ms in self.poles:
            if same_point(b, a):
                own = ms
        start = -own.shape[0] if own is not None else 0
        if order < start:
            return MatrixSeries.empty(a, d, start)
        c = np.zeros((order - start + 1, d, d), dtype=complex)
        if own is not None:
            for j, m in enumerate(own):
                if -(j + 1) <= order:
                    c[-(j + 1) - start] += m
        for j in range(self.poly.shape[0]):
            # z^j = (zeta + a)^j
            for n in range(0, min(j, order) + 1):
                c[n - start] += comb(j, n) * a ** (j - n) * self.poly[j]
        for b, ms in self.poles:
            if same_point(b, a):
                continue
            delta = a - b
            for jj, m in enumerate(ms):
                mult = jj + 1
                # (zeta + delta)^-m
                for n in range(0, order + 1):
                    c[n - start] += (-1) ** n * comb(mult + n - 1, n) * delta ** (-mult - n) * m
        return MatrixSeries(a, start, c)

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        n = max(self.poly.shape[0], other.poly.shape[0])
        poly = np.zeros((n, self.dim, self.dim), dtype=complex)
        poly[: self.poly.shape[0]] += self.poly
        poly[: other.poly.shape[0]] += other.poly
        poles = {}
        order = []
        for b, ms in self.poles + other.poles:
            key = next((k for k in order if same_point(k, b)), None)
            if key is None:
                order.append(b)
                poles[b] = ms.copy()
            else:
                cur = poles[key]
                m = max(cur.shape[0], ms.shape[0])
                acc = np.zeros((m, self.dim, self.dim), dtype=complex)
                acc[: cur.shape[0]] += cur
                acc[: ms.shape[0]] += ms
                poles[key] = acc
        return RationalMatrix(poly, tuple((b, poles[b]) for b in order))


def build_rational(poly: Sequence, poles: dict | Sequence = ()) -> RationalMatrix:
    """Convenience constructor: ``poly`` lists z**0, z**1, ...; ``poles`` maps b -> [M1, M2, ...]."""
    items = poles.items() if isinstance(poles, dict) else poles
    return RationalMatrix(np.array([as_matrix(m) for m in poly]), tuple((b, np.array([as_matrix(m) for m in ms])) for b, ms in items))
