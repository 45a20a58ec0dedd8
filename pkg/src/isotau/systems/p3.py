"""Third Painleve equation: rank-1 irregular points at 0 and infinity."""
import cmath
from fractions import Fraction

import numpy as np

from ..algebra import INFINITY, build_rational
from .base import I2, SIGMA3, LocalFrame, PainleveKind, PainleveSystem, SystemSpec, diag_power, exponent

_Z = np.zeros((2, 2), dtype=complex)


class P3System(PainleveSystem):
    spec = SystemSpec(PainleveKind.P3, Fraction(1), ("q", "p", "log_k", "log_a"), ("theta0", "theta_inf"), (0j,))
    max_order = 1

    def _H(self, th, st, t):
        q, p, th0, thi = st.q, st.p, th.theta0, th.theta_inf
        return (2 * p * p * q * q + p * (2 * t - 2 * t * q * q + (4 * thi - 1) * q)
                - 2 * t * q * (th0 + thi) + thi**2 - th0**2) / t

    def _vf(self, th, st, t):
        q, p, th0, thi = st.q, st.p, th.theta0, th.theta_inf
        return {
            "q": 4 * p * q * q / t - 2 * q * q + q * (4 * thi - 1) / t + 2,
            "p": -4 * p * p * q / t + p * (4 * t * q - 4 * thi + 1) / t + 2 * th0 + 2 * thi,
            "log_k": -4 * p * q / t + 2 * q - 2 * thi / t,
            "log_a": 2 * q + 2 * th0 / t,
        }

    def _tau_correction(self, th, st, t, H):
        return st.p * st.q / t - t

    def _G(self, th, st, t, H):
        return H * t - th.theta_inf * st.log_k - th.theta0 * st.log_a - t * t / 2

    def _parts(self, th, st, t):
        q, p, k, th0, thi = st.q, st.p, st.k, th.theta0, th.theta_inf
        lower = p * q * (t - p) / (k * t) + (th0 + thi) / k - 2 * thi * p / (k * t)
        am1 = np.array([[-thi, -q * k * t], [lower, thi]])
        am2 = np.array([[p - t / 2, -k * t], [p * (p - t) / (k * t), -p + t / 2]])
        return am1, am2, lower

    def _A(self, th, st, t):
        am1, am2, _ = self._parts(th, st, t)
        return build_rational([t / 2 * SIGMA3], {0j: [am1, am2]})

    def _B(self, th, st, t):
        p, k = st.p, st.k
        am1, _, _ = self._parts(th, st, t)
        b0 = np.array([[0, am1[0, 1]], [am1[1, 0], 0]]) / t
        bm1 = np.array([[(t - 2 * p) / (2 * t), k], [p * (t - p) / (k * t * t), (2 * p - t) / (2 * t)]])
        return build_rational([b0, SIGMA3 / 2], {0j: [bm1]})

    def gauge_zero(self, th, st, t):
        p, k = st.p, st.k
        return np.array([[k, -k], [p / t, (t - p) / t]]) / cmath.sqrt(k) @ diag_power(st.log_a, -0.5)

    def _frames(self, th, st, t):
        q, p, k, a, th0, thi = st.q, st.p, st.k, st.a, th.theta0, th.theta_inf
        H = self._H(th, st, t)
        D = (thi**2 - th0**2) / (2 * t)
        d = -H / 2 - p * q / (2 * t) + t / 2
        g_inf = np.array([
            [d + D, k * q],
            [p * q * (t - p) / (k * t * t) + (th0 + thi) / (k * t) - 2 * thi * p / (k * t * t), -(d + D)],
        ])
        g_zero = np.array([
            [d - D, a / t * (q * (p - t) + thi - th0)],
            [-(p * q + th0 + thi) / (t * a), -(d - D)],
        ])
        # Theta_inf = sigma3 (t z/2 - theta_inf ln z); Theta_0 = sigma3 (t/(2z) + theta0 ln z)
        exp_inf = exponent([t / 2 * SIGMA3], thi * SIGMA3)
        exp_zero = exponent([t / 2 * SIGMA3], th0 * SIGMA3)
        return [
            LocalFrame(INFINITY, I2, (g_inf,), exp_inf),
            LocalFrame(0j, self.gauge_zero(th, st, t), (g_zero,), exp_zero),
        ]

    def scalar_coefficients(self, th):
        return {"alpha": 8 * th.theta0, "beta": 4 - 8 * th.theta_inf, "gamma": 4.0, "delta": -4.0}

    def _scalar_denominators(self, q, t):
        return {"q": q, "t": t}

    def _scalar_rhs(self, th, q, qd, t):
        c = self.scalar_coefficients(th)
        return (qd * qd / q - qd / t + (c["alpha"] * q * q + c["beta"]) / t
                + c["gamma"] * q**3 + c["delta"] / q)
