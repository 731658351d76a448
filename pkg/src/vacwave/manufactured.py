"""Manufactured smooth solution of the viscous system with symbolic source terms.

The profiles are monotone in ``x`` so that limited reconstructions stay
second order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import sympy as sp

from .exact_wave import FarField
from .viscous_solver import RegParams


@dataclass
class Manufactured:
    rho: callable
    m: callable
    source: callable  # (t, x) -> (s_rho, s_m)

    def boundary(self, t, x):
        return self.rho(t, x), self.m(t, x)


def build(ff: FarField, rp: RegParams, speed: float = 0.5) -> Manufactured:
    t, x = sp.symbols("t x", real=True)
    phase = sp.tanh(x - speed * t)
    rho = 1 + sp.Rational(1, 2) * phase
    u = sp.Rational(3, 10) + sp.Rational(1, 5) * phase
    m = rho * u
    p = ff.A * rho**ff.gamma
    mu = ff.B * rho**ff.alpha + rp.epsilon * sp.sqrt(rho)
    s_rho = sp.diff(rho, t) + sp.diff(m, x)
    s_m = sp.diff(m, t) + sp.diff(m * u + p, x) - sp.diff(mu * sp.diff(u, x), x)
    f_rho = sp.lambdify((t, x), rho, "numpy")
    f_m = sp.lambdify((t, x), m, "numpy")
    f_src = sp.lambdify((t, x), (s_rho, s_m), "numpy")

    def source(tt, xx):
        a, b = f_src(tt, xx)
        return np.broadcast_to(a, np.shape(xx)), np.broadcast_to(b, np.shape(xx))

    return Manufactured(rho=f_rho, m=f_m, source=source)
