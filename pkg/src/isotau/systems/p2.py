"""Second Painleve equation: single irregular point of rank 3 at infinity.

The exponent theta is stored in ``ThetaParams.theta_inf``; it is the momentum
paired with ``log_k``.
"""
from fractions import Fraction

import numpy as np

from ..algebra import INFINITY, build_rational
from .base import I2, SIGMA3, LocalFrame, PainleveKind, PainleveSystem, SystemSpec, exponent

_Z = np.zeros((2, 2), dtype=complex)


class P2System(PainleveSystem):
    spec = SystemSpec(PainleveKind.P2, Fraction(1), ("q", "p", "log_k"), ("theta_inf",), ())
    max_order = 3

    def _H(self, th, st, t):
        q, p = st.q, st.p
        return p * p / 2 + p * q * q + p * t / 2 + q * th.theta_inf

    def _vf(self, th, st, t):
        q, p = st.q, st.p
        return {"q": p + q * q + t / 2, "p": -2 * p * q - th.theta_inf, "log_k": -q}

    def _G(self, th, st, t, H):
        return 2 * H * t / 3 - st.q * st.p / 3 - th.theta_inf * st.log_k

    def _A(self, th, st, t):
        q, p, k, theta = st.q, st.p, st.k, th.theta_inf
        a1 = np.array([[0, k], [-2 * p / k, 0]])
        a0 = np.array([[p + t / 2, -k * q], [-2 * (theta + p * q) / k, -p - t / 2]])
        return build_rational([a0, a1, SIGMA3])

    def _B(self, th, st, t):
        p, k = st.p, st.k
        b0 = 0.5 * np.array([[0, k], [-2 * p / k, 0]])
        return build_rational([b0, 0.5 * SIGMA3])

    def _frames(self, th, st, t):
        q, p, k, theta = st.q, st.p, st.k, th.theta_inf
        H = self._H(th, st, t)
        g1 = np.array([[-H, -k / 2], [-p / k, H]])
        g2 = np.array([
            [H**2 / 2 + p / 4 - t * theta / 4, -k * H / 2 + k * q / 2],
            [p * H / k - p * q / k - theta / k, H**2 / 2 + p / 4 + t * theta / 4],
        ])
        g3 = np.array([
            [
                -(H**3) / 6 - H * p / 4 + H * t / 6 + H * t * theta / 4 + p * q / 6 + theta**2 / 6 + theta / 3,
                -k * H**2 / 4 + k * q * H / 2 + k * p / 8 + k * t / 4 - k * t * theta / 8,
            ],
            [
                -p * H**2 / (2 * k) + H * p * q / k + H * theta / k + p * p / (4 * k) + p * t * theta / (4 * k) + p * t / (2 * k),
                H**3 / 6 + H * p / 4 - H * t / 6 + H * t * theta / 4 - p * q / 6 - theta**2 / 6 + theta / 6,
            ],
        ])
        # Theta = sigma3 (z^3/3 + t z/2 - theta ln z)
        exp_inf = exponent([t / 2 * SIGMA3, _Z, SIGMA3 / 3], theta * SIGMA3)
        return [LocalFrame(INFINITY, I2, (g1, g2, g3), exp_inf)]

    def scalar_coefficients(self, th):
        return {"alpha": 0.5 - th.theta_inf}

    def _scalar_rhs(self, th, q, qd, t):
        return t * q + 2 * q**3 + 0.5 - th.theta_inf
