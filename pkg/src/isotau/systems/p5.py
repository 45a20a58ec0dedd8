"""Fifth Painleve equation: rank-1 point at infinity, Fuchsian points at 0 and 1."""
import cmath
from fractions import Fraction

import numpy as np

from ..algebra import INFINITY, build_rational
from .base import I2, SIGMA3, LocalFrame, PainleveKind, PainleveSystem, SystemSpec, diag_power, exponent, guard


class P5System(PainleveSystem):
    spec = SystemSpec(
        PainleveKind.P5, Fraction(1), ("q", "p", "log_k", "log_a", "log_b"), ("theta0", "theta1", "theta_inf"), (0j,)
    )
    max_order = 1

    def _H(self, th, st, t):
        q, p, th0, th1, thi = st.q, st.p, th.theta0, th.theta1, th.theta_inf
        return (p * p * (q - 1) ** 2 * q
                + p * (q * q * (th0 + 3 * th1 + thi) + q * (t - 2 * thi - 4 * th1) + (thi + th1 - th0))
                + 2 * q * th1 * (thi + th1 + th0)
                + th0**2 - th1**2 - thi**2 + th1 * t - 2 * th1 * thi) / t

    def _vf(self, th, st, t):
        q, p, th0, th1, thi = st.q, st.p, th.theta0, th.theta1, th.theta_inf
        return {
            "q": (2 * p * q * (q - 1) ** 2 + q * q * (th0 + 3 * th1 + thi) + q * (t - 2 * thi - 4 * th1)
                  + (thi + th1 - th0)) / t,
            "p": (-p * p * (3 * q * q - 4 * q + 1) - p * (2 * q * (th0 + 3 * th1 + thi) + (t - 2 * thi - 4 * th1))
                  - 2 * th1 * (thi + th1 + th0)) / t,
            "log_k": -(p * q * q - 2 * p * q + p + 2 * th1 * q - 2 * thi - 2 * th1) / t,
            "log_a": (p - p * q * q - 2 * th1 * q - 2 * th0) / t,
            "log_b": -(3 * p * q * q + p - 4 * p * q + 2 * thi * q + 4 * th1 * q + 2 * th0 * q - 2 * thi - 2 * th1 + t) / t,
        }

    def _G(self, th, st, t, H):
        return H * t - th.theta_inf * st.log_k - th.theta0 * st.log_a - th.theta1 * st.log_b

    def _residues(self, th, st, t):
        q, p, k, th0, th1, thi = st.q, st.p, st.k, th.theta0, th.theta1, th.theta_inf
        s = p * q + thi + th1
        a0 = np.array([[-s, k * (s - th0)], [-(s + th0) / k, s]])
        a1 = np.array([[p * q + th1, -k * q * (p * q + 2 * th1)], [p / k, -p * q - th1]])
        return a0, a1

    def _A(self, th, st, t):
        a0, a1 = self._residues(th, st, t)
        return build_rational([t / 2 * SIGMA3], {0j: [a0], 1 + 0j: [a1]})

    def _B(self, th, st, t):
        q, p, k, th0, th1, thi = st.q, st.p, st.k, th.theta0, th.theta1, th.theta_inf
        b0 = np.array([
            [0, k / t * (-p * q * q + p * q - 2 * th1 * q + thi + th1 - th0)],
            [-(p * q + thi - p + th1 + th0) / (t * k), 0],
        ])
        return build_rational([b0, SIGMA3 / 2])

    def gauges(self, th, st, t):
        q, p, k, th0, th1, thi = st.q, st.p, st.k, th.theta0, th.theta1, th.theta_inf
        guard(theta0=th0, theta1=th1)
        s = 2 * p * q + 2 * thi + 2 * th1
        g0 = np.array([[k * (s - 2 * th0), k], [s + 2 * th0, 1]]) / cmath.sqrt(-4 * k * th0)
        g1 = np.array([[k * (p * q + 2 * th1), k * q], [p, 1]]) / cmath.sqrt(2 * k * th1)
        return g0 @ diag_power(st.log_a, -0.5), g1 @ diag_power(st.log_b, -0.5)

    def _frames(self, th, st, t):
        q, p, k, th0, th1, thi = st.q, st.p, st.k, th.theta0, th.theta1, th.theta_inf
        H = self._H(th, st, t)
        g1 = np.array([
            [-H, k * (p * q * q - p * q + 2 * th1 * q - thi - th1 + th0) / t],
            [-(p * q - p + thi + th1 + th0) / (t * k), H],
        ])
        G0, G1 = self.gauges(th, st, t)
        return [
            LocalFrame(INFINITY, I2, (g1,), exponent([t / 2 * SIGMA3], thi * SIGMA3)),
            LocalFrame(0j, G0, (), exponent([], th0 * SIGMA3)),
            LocalFrame(1 + 0j, G1, (), exponent([], th1 * SIGMA3)),
        ]

    def scalar_coefficients(self, th):
        th0, th1, thi = th.theta0, th.theta1, th.theta_inf
        return {
            "alpha": (th0 - th1 + thi) ** 2 / 2,
            "beta": -((th0 - th1 - thi) ** 2) / 2,
            "gamma": 1 - 2 * th0 - 2 * th1,
            "delta": -0.5 + 0j,
        }

    def _scalar_denominators(self, q, t):
        return {"q": q, "q-1": q - 1, "t": t}

    def _scalar_rhs(self, th, q, qd, t):
        c = self.scalar_coefficients(th)
        return ((1 / (2 * q) + 1 / (q - 1)) * qd * qd - qd / t
                + (q - 1) ** 2 / (t * t) * (c["alpha"] * q + c["beta"] / q)
                + c["gamma"] * q / t + c["delta"] * q * (q + 1) / (q - 1))
