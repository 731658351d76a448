"""Energy, entropy and dissipation functionals measured against the approximate wave.

Spatial integrals use the midpoint rule on the cell grid; gradients use
centred differences (one-sided at the ends, via ``np.gradient``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .approx_wave import WaveParams, smooth_wave
from .errors import ConfigurationError, DomainError
from .exact_wave import FarField, exact_wave, lambda2, sound_speed, vacuum_edge_speed
from .viscous_solver import RegParams, SimState, mu_eps


def _bracket(rho, rho_bar, ff):
    g = ff.gamma
    return rho**g - rho_bar**g - g * rho_bar ** (g - 1.0) * (rho - rho_bar)


def psi(rho, rho_bar, ff: FarField):
    """Relative entropy density ``int_{rho_bar}^{rho} (p(s) - p(rho_bar)) / s^2 ds``."""
    rho = np.asarray(rho, dtype=float)
    rho_bar = np.asarray(rho_bar, dtype=float)
    if np.any(rho <= 0):
        raise DomainError("psi needs rho > 0; use rho_psi at vacuum")
    if np.any(rho_bar < 0):
        raise DomainError("rho_bar must be nonnegative")
    return ff.A * _bracket(rho, rho_bar, ff) / ((ff.gamma - 1.0) * rho)


def rho_psi(rho, rho_bar, ff: FarField):
    """``rho * psi``, continuous down to ``rho = 0`` where it equals ``A * rho_bar**gamma``."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise DomainError("rho must be nonnegative")
    return ff.A * _bracket(rho, np.asarray(rho_bar, dtype=float), ff) / (ff.gamma - 1.0)


def bd_phi(rho, rp: RegParams, ff: FarField):
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise DomainError("BD potential needs rho > 0")
    th = rp.theta
    reg = rp.epsilon * rho ** (th - 1.0) / (th - 1.0)
    if ff.alpha == 1.0:
        return ff.B * np.log(rho) + reg
    return ff.B * rho ** (ff.alpha - 1.0) / (ff.alpha - 1.0) + reg


def bd_phi_x(rho, rp: RegParams, ff: FarField, dx: float):
    return np.gradient(bd_phi(rho, rp, ff), dx)


@dataclass
class FunctionalReport:
    t: float
    E_kin: float
    E_ent: float
    E_grad: float
    E_bd: float
    D_pres: float
    D_kin: float
    D_visc: float
    D_dens: float
    sup_dist: float
    f_decay: float
    lambda_flux_proxy: float

    @classmethod
    def columns(cls):
        return [f.name for f in fields(cls)]

    def row(self):
        return [getattr(self, c) for c in self.columns()]


DISSIPATION = ("D_pres", "D_kin", "D_visc", "D_dens")


class Accumulators:
    """Time integrals of the dissipation densities, advanced by the trapezoid rule."""

    def __init__(self):
        self.t = None
        self.rates = None
        self.totals = dict.fromkeys(DISSIPATION, 0.0)

    def advance(self, t: float, rates: dict):
        if self.t is not None and t > self.t:
            dt = t - self.t
            for k in DISSIPATION:
                self.totals[k] += 0.5 * dt * (self.rates[k] + rates[k])
        self.t, self.rates = t, dict(rates)

    def to_dict(self):
        return {"t": self.t, "rates": self.rates, "totals": self.totals}

    @classmethod
    def from_dict(cls, d):
        acc = cls()
        acc.t, acc.rates, acc.totals = d["t"], d["rates"], dict(d["totals"])
        return acc


def default_s(ff: FarField) -> float:
    return (ff.alpha + ff.gamma - 1.0) / 2.0 + 1.5


def _check_fparams(s, l, ff):
    b = (ff.alpha + ff.gamma - 1.0) / 2.0
    if not s > b + 1.0:
        raise ConfigurationError(f"f_decay needs s > b+1 = {b + 1.0}, got s={s}")
    if l < 1 or int(l) != l:
        raise ConfigurationError(f"f_decay needs an integer l >= 1, got l={l}")


def f_decay(state: SimState, wp: WaveParams, ff: FarField, s: float | None = None, l: int = 1, rho_bar=None):
    """``int (rho^s - rho_bar^s)^(4+2l) dx``."""
    s = default_s(ff) if s is None else s
    _check_fparams(s, l, ff)
    if rho_bar is None:
        rho_bar = smooth_wave(state.t, state.x, ff, wp).rho_bar
    return float(np.sum((state.rho**s - rho_bar**s) ** (4 + 2 * int(l))) * state.dx)


def functional_report(state: SimState, rp: RegParams, ff: FarField, wp: WaveParams,
                      accumulators: Accumulators | None = None, s: float | None = None, l: int = 1,
                      extras: bool = False):
    """Evaluate every functional at ``state.t`` and advance ``accumulators``.

    With ``extras=True`` returns ``(report, extra)`` where ``extra`` holds the
    cubic moment ``int rho |u - u_bar|^3``.
    """
    s = default_s(ff) if s is None else s
    _check_fparams(s, l, ff)
    dx = state.dx
    rho, u = state.rho, state.u
    ev = smooth_wave(state.t, state.x, ff, wp)
    rb, ub, ubx = ev.rho_bar, ev.u_bar, ev.u_bar_x
    du = u - ub
    grad = lambda f: np.gradient(f, dx)  # noqa: E731

    def integ(f):
        return float(np.sum(f) * dx)

    g = ff.gamma
    b = (ff.alpha + g - 1.0) / 2.0
    du_x = grad(du)
    rates = {
        "D_pres": integ(ubx * ff.A * _bracket(rho, rb, ff)),
        "D_kin": integ(rho * ubx * du**2),
        "D_visc": integ(mu_eps(rho, rp, ff) * du_x**2),
        "D_dens": integ(grad(rho**b - rb**b) ** 2),
    }
    if accumulators is None:
        accumulators = Accumulators()
    accumulators.advance(state.t, rates)
    rep = FunctionalReport(
        t=state.t,
        E_kin=integ(rho * du**2),
        E_ent=integ(rho_psi(rho, rb, ff)),
        E_grad=integ(grad(rho ** (ff.alpha - 0.5)) ** 2),
        E_bd=integ(rho * (du + bd_phi_x(rho, rp, ff, dx)) ** 2),
        sup_dist=float(np.max(np.abs(rho - rb))),
        f_decay=f_decay(state, wp, ff, s, l, rho_bar=rb),
        lambda_flux_proxy=integ(rho**ff.alpha * du_x**2),
        **accumulators.totals,
    )
    if extras:
        return rep, {"cubic_moment": integ(rho * np.abs(du) ** 3)}
    return rep


def sup_and_lp_distance(state: SimState, target: str, p, ff: FarField, wp: WaveParams | None = None):
    """Discrete ``||rho - target||_p`` for ``p in (2, inf]``; target is 'exact' or 'smooth'."""
    if not p > 2:
        raise DomainError(f"p must exceed 2, got {p}")
    if target == "exact":
        if state.t <= 0:
            raise DomainError("the self-similar wave is undefined at t = 0")
        ref = exact_wave(state.x / state.t, ff).rho
    elif target == "smooth":
        if wp is None:
            raise DomainError("smooth target needs wave parameters")
        ref = smooth_wave(state.t, state.x, ff, wp).rho_bar
    else:
        raise DomainError(f"unknown target {target!r}")
    d = np.abs(state.rho - ref)
    if math.isinf(p):
        return float(np.max(d))
    return float((np.sum(d**p) * state.dx) ** (1.0 / p))


@dataclass
class RegionCheck:
    sigma: float
    u_sigma: float
    lambda2_sigma: float
    T_sigma_measured: float | None
    attained: bool
    min_ratio: list  # per observation: min rho over the wedge divided by sigma/2


def wave_curve_speed(sigma, ff: FarField):
    """``u_sigma`` such that ``(sigma, u_sigma)`` lies on the 2-rarefaction curve."""
    return 2.0 * float(sound_speed(sigma, ff)) / (ff.gamma - 1.0) + vacuum_edge_speed(ff)


def region_check(trajectory, ff: FarField, sigma: float) -> RegionCheck:
    """Scan ``trajectory`` (iterable of ``(t, x, rho)``) for the lower bound on the wedge.

    Returns the first observed time from which ``min_{x > lambda2_sigma t} rho >= sigma/2``
    holds at every later observation.
    """
    if not (0 < sigma <= ff.rho_plus):
        raise DomainError("sigma must lie in (0, rho_plus]")
    u_s = wave_curve_speed(sigma, ff)
    lam = float(lambda2(sigma, u_s, ff))
    times, ok, ratios = [], [], []
    for t, x, rho in trajectory:
        sel = np.asarray(x) > lam * t
        mn = float(np.min(np.asarray(rho)[sel])) if sel.any() else math.inf
        times.append(t)
        ok.append(mn >= sigma / 2)
        ratios.append(mn / (sigma / 2))
    T = None
    for k in range(len(ok) - 1, -1, -1):
        if not ok[k]:
            break
        T = times[k]
    return RegionCheck(sigma, u_s, lam, T, T is not None, ratios)


@dataclass
class VacuumCheck:
    threshold: float
    samples: list  # (t, min rho over x < u_- t - margin, or None when the set misses the grid)
    passed: bool


def vacuum_persistence(trajectory, ff: FarField, nu: float, margin: float = 5.0) -> VacuumCheck:
    """Check ``min_{x < u_- t - margin} rho <= 2 nu`` at every observation."""
    u_minus = vacuum_edge_speed(ff)
    samples = []
    for t, x, rho in trajectory:
        sel = np.asarray(x) < u_minus * t - margin
        samples.append((t, float(np.min(np.asarray(rho)[sel])) if sel.any() else None))
    measured = [v for _, v in samples if v is not None]
    passed = bool(measured) and all(v <= 2.0 * nu for v in measured)
    return VacuumCheck(2.0 * nu, samples, passed)
