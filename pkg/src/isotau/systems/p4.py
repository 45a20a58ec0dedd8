"""Fourth Painleve equation: rank-2 point at infinity, Fuchsian point at 0."""
import cmath
from fractions import Fraction

import numpy as np

from ..algebra import INFINITY, build_rational
from .base import I2, SIGMA3, LocalFrame, PainleveKind, PainleveSystem, SystemSpec, diag_power, exponent, guard

_Z = np.zeros((2, 2), dtype=complex)


class P4System(PainleveSystem):
    spec = SystemSpec(PainleveKind.P4, Fraction(1), ("q", "p", "log_k", "log_a"), ("theta0", "theta_inf"), ())
    max_order = 2

    def _denominators(self, th, st, t):
        return {"q": st.q}

    def _H(self, th, st, t):
        q, p, th0, thi = st.q, st.p, th.theta0, th.theta_inf
        return (2 * p * p * q - q**3 / 8 - t * q * q / 2 + (2 * thi - 1 - t * t) * q / 2
                + 2 * thi * t - 2 * th0**2 / q)

    def _vf(self, th, st, t):
        q, p, th0, thi = st.q, st.p, th.theta0, th.theta_inf
        return {
            "q": 4 * p * q,
            "p": -2 * p * p + 3 * q * q / 8 + q * t + t * t / 2 - thi + 0.5 - 2 * th0**2 / (q * q),
            "log_k": -(q + 2 * t),
            "log_a": 4 * th0 / q,
        }

    def _tau_correction(self, th, st, t, H):
        return st.q / 2

    def _G(self, th, st, t, H):
        return H * t / 2 - st.p * st.q / 2 - th.theta_inf * st.log_k - th.theta0 * st.log_a

    def _A(self, th, st, t):
        q, p, k, th0, thi = st.q, st.p, st.k, th.theta0, th.theta_inf
        X = q * (4 * p - q - 2 * t)
        a0 = np.array([[t, k], [-(X + 4 * thi) / (2 * k), -t]])
        am1 = 0.5 * np.array([[X / 2, -k * q], [(X * X - 16 * th0**2) / (4 * k * q), -X / 2]])
        return build_rational([a0, SIGMA3], {0j: [am1]})

    def _B(self, th, st, t):
        # off-diagonal part of A_0 (the (2,1) sign is fixed by Lax compatibility)
        q, p, k, thi = st.q, st.p, st.k, th.theta_inf
        X = q * (4 * p - q - 2 * t)
        b0 = np.array([[0, k], [-(X + 4 * thi) / (2 * k), 0]])
        return build_rational([b0, SIGMA3])

    def gauge_zero(self, th, st, t):
        q, p, k, th0 = st.q, st.p, st.k, th.theta0
        guard(theta0=th0)
        X = q * (4 * p - q - 2 * t)
        m = np.array([[-k * q, -k * q], [-(X - 4 * th0) / 2, -(X + 4 * th0) / 2]])
        return m / (2 * cmath.sqrt(k * q * th0)) @ diag_power(st.log_a, -0.5)

    def _frames(self, th, st, t):
        q, p, k, th0, thi = st.q, st.p, st.k, th.theta0, th.theta_inf
        H = self._H(th, st, t)
        X = q * (4 * p - q - 2 * t)
        g1 = 0.5 * np.array([[-(2 * H + q) / 2, -k], [-(X + 4 * thi) / (2 * k), (2 * H + q) / 2]])
        sq = (2 * H + q + 2 * t) ** 2 - 4 * t * t
        g2 = np.array([
            [(sq - 8 * th0**2 + 8 * thi**2) / 4, -k * (2 * H - q - 4 * t)],
            [((2 * H - q) * (X + 4 * thi + 4) + 8 * q) / (2 * k), (sq + 8 * th0**2 - 8 * thi**2) / 4],
        ]) / 8
        # Theta_inf = sigma3 (z^2/2 + t z - theta_inf ln z); Theta_0 = theta0 sigma3 ln z
        exp_inf = exponent([t * SIGMA3, SIGMA3 / 2], thi * SIGMA3)
        exp_zero = exponent([], th0 * SIGMA3)
        return [
            LocalFrame(INFINITY, I2, (g1, g2), exp_inf),
            LocalFrame(0j, self.gauge_zero(th, st, t), (), exp_zero),
        ]

    def scalar_coefficients(self, th):
        return {"alpha": 2 * th.theta_inf - 1, "beta": -8 * th.theta0**2}

    def _scalar_denominators(self, q, t):
        return {"q": q}

    def _scalar_rhs(self, th, q, qd, t):
        c = self.scalar_coefficients(th)
        return qd * qd / (2 * q) + 1.5 * q**3 + 4 * t * q * q + 2 * (t * t - c["alpha"]) * q + c["beta"] / q
