"""Sixth Painleve equation: four Fuchsian points 0, 1, t, infinity."""
import cmath
from fractions import Fraction

import numpy as np

from ..algebra import build_rational
from .base import SIGMA3, LocalFrame, PainleveKind, PainleveSystem, PviResidueParams, SystemSpec, diag_power, exponent, guard


def _residue(x, theta, u):
    return np.array([[x + theta, -u * x], [(x + 2 * theta) / u, -x - theta]])


class P6System(PainleveSystem):
    spec = SystemSpec(
        PainleveKind.P6,
        Fraction(1),
        ("q", "p", "log_k", "log_a", "log_b", "log_c"),
        ("theta0", "theta1", "theta_t", "theta_inf"),
        (0j, 1 + 0j),
    )
    max_order = 1

    def _denominators(self, th, st, t):
        return {"q": st.q, "q-1": st.q - 1, "q-t": st.q - t, "t-1": t - 1, "t": t}

    def _H(self, th, st, t):
        q, p = st.q, st.p
        th0, th1, tht, thi = th.theta0, th.theta1, th.theta_t, th.theta_inf
        T = t * (t - 1)
        return (p * p * q * (q - 1) * (q - t) / T + p * q * (q - 1) / T + thi * (1 - thi) * (q - t) / T
                + th0**2 * (q - t) / (q * T) - th1**2 * (q - t) / ((q - 1) * T)
                + tht**2 * (t * t - q * (2 * t - 1)) / ((q - t) * T))

    def _vf(self, th, st, t):
        q, p = st.q, st.p
        th0, th1, tht, thi = th.theta0, th.theta1, th.theta_t, th.theta_inf
        T = t * (t - 1)
        return {
            "q": 2 * p * q * (q - 1) * (q - t) / T + q * (q - 1) / T,
            "p": (4 * p * p * (2 * t * q - 3 * q * q - t + 2 * q) + 4 * p * (1 - 2 * q) + 4 * thi * (thi - 1)) / (4 * T)
            - th0**2 / (q * q * (t - 1)) + th1**2 / (t * (q - 1) ** 2) - tht**2 / (q - t) ** 2,
            "log_k": (2 * thi - 1) * (q - t) / T,
            "log_a": -2 * th0 * (q - t) / (q * T),
            "log_b": 2 * th1 * (q - t) / (T * (q - 1)),
            "log_c": 2 * tht * (q * (2 * t - 1) - t * t) / ((q - t) * T),
        }

    def _tau_correction(self, th, st, t, H):
        q, p = st.q, st.p
        T = t * (t - 1)
        return -p * q * (q - 1) / T - th.theta_inf * (q - t) / T

    def _G(self, th, st, t, H):
        return -(th.theta0 * st.log_a + th.theta1 * st.log_b + th.theta_t * st.log_c + th.theta_inf * st.log_k)

    def residue_params(self, th, st, t) -> PviResidueParams:
        """x0, x1, xt first, then u, v, w; the linear constraints are asserted."""
        self.check(th, st, t)
        q, p, k = st.q, st.p, st.k
        th0, th1, tht, thi = th.theta0, th.theta1, th.theta_t, th.theta_inf
        guard(theta_inf=2 * thi)
        x0 = (p * p * q * q * (q - 1) * (q - t) / (t * 2 * thi) + p * q * (q - 1) * (q - t) / t
              + thi * q * (q - t - 1) / (2 * t) + th1**2 * (t - 1) / (2 * t * thi * (q - 1))
              - tht**2 * t * (t - 1) / (2 * thi * (q - t)) - th1**2 * (1 - t) / (2 * t * thi)
              - tht**2 * t * (t - 1) / (2 * t * thi) - th0 - th0**2 / (2 * thi))
        x1 = (p * p * q * (q - 1) ** 2 * (t - q) / ((t - 1) * 2 * thi) + p * q * (q - 1) * (t - q) / (t - 1)
              + thi * (q - 1) * (t - q - 1) / (2 * (t - 1)) - th0**2 * t / (2 * q * thi * (t - 1))
              + tht**2 * t * (t - 1) / (2 * thi * (q - t)) + th0**2 * t / (2 * (t - 1) * thi)
              + tht**2 * t * (t - 1) / (2 * (t - 1) * thi) - th1 - th1**2 / (2 * thi))
        xt = (p * p * q * (q - 1) * (t - q) ** 2 / (t * (t - 1) * 2 * thi) + p * q * (q - 1) * (q - t) / (t * (t - 1))
              + thi * (q - t) * (q + t - 1) / (2 * t * (t - 1)) + th0**2 * t / (2 * q * thi * (t - 1))
              - th1**2 * (t - 1) / (2 * thi * t * (q - 1)) - th0**2 / (2 * (t - 1) * thi) + th1**2 / (2 * t * thi)
              - tht - tht**2 / (2 * thi))
        guard(x0=x0, x1=x1, xt=xt)
        u = k * q / (x0 * t)
        v = k * (q - 1) / (x1 * (1 - t))
        w = k * (t - q) / (xt * t * (1 - t))
        prm = PviResidueParams(x0, x1, xt, u, v, w, k)
        prm.check(th, q, t)
        return prm

    def residues(self, th, st, t):
        prm = self.residue_params(th, st, t)
        return (_residue(prm.x0, th.theta0, prm.u), _residue(prm.x1, th.theta1, prm.v),
                _residue(prm.xt, th.theta_t, prm.w))

    def _A(self, th, st, t):
        a0, a1, at = self.residues(th, st, t)
        z = np.zeros((2, 2), dtype=complex)
        return build_rational([z], {0j: [a0], 1 + 0j: [a1], t: [at]})

    def _B(self, th, st, t):
        _, _, at = self.residues(th, st, t)
        z = np.zeros((2, 2), dtype=complex)
        return build_rational([z], {t: [-at]})

    def gauges(self, th, st, t):
        prm = self.residue_params(th, st, t)
        q, k = st.q, st.k

        def g(scale, u, x, theta, log_x):
            m = np.array([[1, 1], [1 / u, (x + 2 * theta) / (u * x)]])
            return cmath.sqrt(scale) * m @ diag_power(log_x, -0.5)

        return (
            g(k * q / t, prm.u, prm.x0, th.theta0, st.log_a),
            g(k * (q - 1) / (1 - t), prm.v, prm.x1, th.theta1, st.log_b),
            g(k * (t - q) / (t * (1 - t)), prm.w, prm.xt, th.theta_t, st.log_c),
        )

    def _frames(self, th, st, t):
        q, p, c = st.q, st.p, st.c
        th0, th1, tht, thi = th.theta0, th.theta1, th.theta_t, th.theta_inf
        guard(theta_t=tht, **{"1-2theta_t": 1 - 2 * tht, "1+2theta_t": 1 + 2 * tht})
        G0, G1, Gt = self.gauges(th, st, t)
        H = self._H(th, st, t)
        T = t * (t - 1)
        E = H / (2 * tht) - p * q * (q - 1) / (2 * tht * T) - thi * (q - t) / (2 * tht * T)
        F = tht * (2 * q * t - t * t - q) / (T * (q - t))
        rest = p * q * (q - 1) / (2 * tht * T) + thi * (q - t) / (2 * tht * T)
        g12 = c * (H / (2 * tht * (1 - 2 * tht)) - rest - F / (2 * tht - 1))
        g21 = (-H / (2 * tht * (1 + 2 * tht)) + rest - F / (2 * tht + 1)) / c
        g1 = np.array([[E, g12], [g21, -E]])
        return [
            LocalFrame(0j, G0, (), exponent([], th0 * SIGMA3)),
            LocalFrame(1 + 0j, G1, (), exponent([], th1 * SIGMA3)),
            LocalFrame(t, Gt, (g1,), exponent([], tht * SIGMA3)),
        ]

    def scalar_coefficients(self, th):
        return {
            "alpha": (2 * th.theta_inf - 1) ** 2 / 2,
            "beta": -2 * th.theta0**2,
            "gamma": 2 * th.theta1**2,
            "delta": (1 - 4 * th.theta_t**2) / 2,
        }

    def _scalar_denominators(self, q, t):
        return {"q": q, "q-1": q - 1, "q-t": q - t, "t-1": t - 1}

    def _scalar_rhs(self, th, q, qd, t):
        c = self.scalar_coefficients(th)
        T = t * (t - 1)
        return (0.5 * (1 / q + 1 / (q - 1) + 1 / (q - t)) * qd * qd
                - (1 / t + 1 / (t - 1) + 1 / (q - t)) * qd
                + q * (q - 1) * (q - t) / (T * T)
                * (c["alpha"] + c["beta"] * t / (q * q) + c["gamma"] * (t - 1) / (q - 1) ** 2 + c["delta"] * T / (q - t) ** 2))
