"""First Painleve equation: rank-5 point at infinity, resonant Fuchsian point at 0."""
from fractions import Fraction

import numpy as np

from ..algebra import INFINITY, build_rational
from .base import I2, SIGMA3, LocalFrame, PainleveKind, PainleveSystem, SystemSpec, exponent

_Z = np.zeros((2, 2), dtype=complex)
_SX = np.array([[0, 1], [1, 0]], dtype=complex)


class P1System(PainleveSystem):
    spec = SystemSpec(PainleveKind.P1, Fraction(2), ("q", "p"), (), ())
    max_order = 5

    def _H(self, th, st, t):
        q, p = st.q, st.p
        return p * p / 2 - 2 * q**3 - t * q

    def _vf(self, th, st, t):
        return {"q": st.p, "p": 6 * st.q**2 + t}

    def _tau_correction(self, th, st, t, H):
        # the density is 2H
        return H

    def _G(self, th, st, t, H):
        return 0.4 * (4 * H * t - 2 * st.p * st.q)

    def _A(self, th, st, t):
        q, p = st.q, st.p
        s = 2 * q * q + t
        a0 = np.array([[s, -s], [s, -s]])
        a1 = np.array([[0, -2 * p], [-2 * p, 0]])
        a2 = np.array([[0, -4 * q], [4 * q, 0]])
        return build_rational([a0, a1, a2, _Z, 4 * SIGMA3], {0j: [-0.5 * _SX]})

    def _B(self, th, st, t):
        q = st.q
        return build_rational([_Z, SIGMA3], {0j: [np.array([[q, -q], [q, -q]])]})

    def _frames(self, th, st, t):
        q, p = st.q, st.p
        H = self._H(th, st, t)
        Y = 2 * p - t * t
        g1 = np.diag([-H, H])
        g2 = np.array([[H**2 / 2, q / 2], [q / 2, H**2 / 2]])
        o3 = q * H / 2 + p / 4
        d3 = -(H**3) / 6 - Y / 24
        g3 = np.array([[d3, o3], [-o3, -d3]])
        o4 = q * H**2 / 4 + p * H / 4 + (2 * q * q + t) / 8
        d4 = H**4 / 24 + Y * H / 24 + q * q / 8
        g4 = np.array([[d4, o4], [o4, d4]])
        d5 = -(H**5) / 120 - Y * H**2 / 48 - (5 * q * q - 2 * t) * H / 40 - (4 * p * q + 1) / 160
        o5 = q * H**3 / 12 + p * H**2 / 8 + (2 * q * q + t) * H / 8 + Y * q / 48 + 1 / 16
        g5 = np.array([[d5, o5], [-o5, -d5]])
        # Theta = sigma3 (4 z^5 / 5 + t z), zeta = 1/z
        exp_inf = exponent([t * SIGMA3, _Z, _Z, _Z, 0.8 * SIGMA3], _Z)
        return [LocalFrame(INFINITY, I2, (g1, g2, g3, g4, g5), exp_inf)]

    def _scalar_rhs(self, th, q, qd, t):
        return 6 * q * q + t
