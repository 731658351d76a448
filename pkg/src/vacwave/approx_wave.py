"""Smooth approximate 2-rarefaction wave built from a Burgers solution.

The Burgers datum is

    w0(x) = (w+ + w-)/2 + (w+ - w-)/2 * K_q * int_0^{eta x} (1+y^2)^{-q} dy,

and the wave ``(rho_bar, u_bar)(t, x)`` is obtained by inverting
``lambda2 = w(1+t, x)``, ``sigma2 = sigma2(rho+, u+)``.

The normalised integral is a Student-t type CDF; it is evaluated through the
regularised incomplete beta function so that both tails keep full relative
precision (the wave is evaluated deep inside the near-vacuum tail).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import ConvergenceError, DomainError
from .exact_wave import (
    FarField,
    density_from_sound_speed,
    lambda2,
    sigma2,
    vacuum_edge_speed,
    cutoff_state,
)

MAX_NEWTON = 200


def kq_constant(q: float) -> float:
    """Return ``K_q = 1 / int_0^inf (1+y^2)^{-q} dy``.

    The substitution ``y = tan(s)`` maps the integral to
    ``int_0^{pi/2} cos(s)^{2q-2} ds`` which adaptive quadrature handles to
    full precision.
    """
    if q < 2:
        raise DomainError(f"tail exponent q must be >= 2, got {q}")
    val, _ = integrate.quad(
        lambda s: math.cos(s) ** (2.0 * q - 2.0), 0.0, math.pi / 2, epsabs=1e-13, epsrel=1e-13, limit=200
    )
    return 1.0 / val


@dataclass(frozen=True)
class WaveParams:
    w_minus: float
    w_plus: float
    eta: float = 0.1
    q: float = 2.0

    def __post_init__(self):
        if not self.w_minus < self.w_plus:
            raise DomainError("need w_minus < w_plus")
        if not self.eta > 0:
            raise DomainError("eta must be positive")
        if self.q < 2:
            raise DomainError("q must be >= 2")
        object.__setattr__(self, "K_q", kq_constant(self.q))

    @property
    def delta_r(self) -> float:
        return self.w_plus - self.w_minus

    @classmethod
    def for_far_field(cls, ff: FarField, nu: float | None = None, eta: float = 0.1, q: float = 2.0):
        """Endpoints ``w- = lambda2(left state)``, ``w+ = lambda2(rho+, u+)``.

        ``nu=None`` selects the vacuum left state, otherwise the cut-off state.
        """
        w_plus = float(lambda2(ff.rho_plus, ff.u_plus, ff))
        if nu is None:
            w_minus = vacuum_edge_speed(ff)
        else:
            left = cutoff_state(nu, ff)
            w_minus = float(lambda2(left.rho, left.u, ff))
        return cls(w_minus=w_minus, w_plus=w_plus, eta=eta, q=q)


@dataclass(frozen=True)
class SmoothWaveEval:
    rho_bar: np.ndarray
    u_bar: np.ndarray
    rho_bar_x: np.ndarray
    u_bar_x: np.ndarray
    u_bar_xx: np.ndarray
    w: np.ndarray
    x0: np.ndarray

    @property
    def m_bar(self):
        return self.rho_bar * self.u_bar


def _cdf_pair(z, q):
    """Return ``(F, 1-F)`` with ``F(z) = K_q/2 * int_{-inf}^z (1+y^2)^{-q} dy``."""
    z = np.asarray(z, dtype=float)
    zz = z * z
    # the argument nearest 0 keeps full precision: tail form for |z|>1, core form otherwise
    half_tail = np.where(
        zz > 1.0,
        0.5 * special.betainc(q - 0.5, 0.5, 1.0 / (1.0 + zz)),
        0.5 - 0.5 * special.betainc(0.5, q - 0.5, zz / (1.0 + zz)),
    )
    neg = z < 0
    lower = np.where(neg, half_tail, 1.0 - half_tail)
    upper = np.where(neg, 1.0 - half_tail, half_tail)
    return lower, upper


def w0(x, wp: WaveParams):
    lower, _ = _cdf_pair(wp.eta * np.asarray(x, dtype=float), wp.q)
    return wp.w_minus + wp.delta_r * lower


def w0_offsets(x, wp: WaveParams):
    """``(w0 - w-, w+ - w0)``, each accurate in its own tail."""
    lower, upper = _cdf_pair(wp.eta * np.asarray(x, dtype=float), wp.q)
    return wp.delta_r * lower, wp.delta_r * upper


def w0_prime(x, wp: WaveParams):
    y = wp.eta * np.asarray(x, dtype=float)
    return 0.5 * wp.delta_r * wp.K_q * wp.eta * (1.0 + y * y) ** (-wp.q)


def w0_second(x, wp: WaveParams):
    y = wp.eta * np.asarray(x, dtype=float)
    return -wp.delta_r * wp.K_q * wp.q * wp.eta**2 * y * (1.0 + y * y) ** (-wp.q - 1.0)


def _residual(x0, t, hi, wp):
    # x0 + t*w0(x0) - x written about the bracket end hi = x - w_minus*t
    g, _ = w0_offsets(x0, wp)
    return (x0 - hi) + t * g


def burgers_solve(t, x, wp: WaveParams, x0_guess=None):
    """Solve ``x = x0 + w0(x0) t`` for the characteristic foot ``x0``.

    Safeguarded Newton inside the exact bracket ``[x - w+ t, x - w- t]``
    (``w- < w0 < w+``), falling back to bisection whenever a Newton iterate
    leaves the bracket. Returns ``(w, x0)``.
    """
    t_arr, x_arr = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
    if np.any(t_arr < 0):
        raise DomainError("time must be nonnegative")
    t_arr = t_arr.astype(float).ravel()
    x_arr = x_arr.astype(float).ravel()
    lo = x_arr - wp.w_plus * t_arr
    hi = x_arr - wp.w_minus * t_arr
    hi_ref = hi.copy()
    tol = 1e-12 * np.maximum(1.0, np.abs(x_arr))

    if x0_guess is None:
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            speed = np.where(t_arr > 0, np.clip(x_arr / t_arr, wp.w_minus, wp.w_plus), 0.0)
        x0 = x_arr - speed * t_arr
    else:
        x0 = np.broadcast_to(np.asarray(x0_guess, dtype=float), x_arr.shape).ravel().copy()
    x0 = np.clip(x0, lo, hi)

    active = t_arr > 0
    x0[~active] = x_arr[~active]
    for _ in range(MAX_NEWTON):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        xa, ta, la, ha = x0[idx], t_arr[idx], lo[idx], hi[idx]
        F = _residual(xa, ta, hi_ref[idx], wp)
        done = np.abs(F) < tol[idx]
        # bracket update from the sign of the monotone residual
        la = np.where(F < 0, xa, la)
        ha = np.where(F > 0, xa, ha)
        dF = 1.0 + ta * w0_prime(xa, wp)
        xn = xa - F / dF
        bad = ~((xn > la) & (xn < ha))
        xn = np.where(bad, 0.5 * (la + ha), xn)
        collapsed = (ha - la) <= 4.0 * np.spacing(np.maximum(np.abs(la), np.abs(ha)))
        # one polishing Newton step after reaching tolerance
        Fn = np.where(done, _residual(xn, ta, hi_ref[idx], wp), np.inf)
        keep = done & (np.abs(Fn) <= np.abs(F))
        x0[idx] = np.where(done & ~keep, xa, xn)
        lo[idx], hi[idx] = la, ha
        active[idx] = ~(done | collapsed)
    else:
        if active.any():
            i = int(np.nonzero(active)[0][0])
            raise ConvergenceError(
                f"characteristic solve did not converge in {MAX_NEWTON} iterations; "
                f"bracket [{lo[i]!r}, {hi[i]!r}] at t={t_arr[i]}, x={x_arr[i]}"
            )
    shape = np.broadcast(np.asarray(t), np.asarray(x)).shape
    x0 = x0.reshape(shape)
    return w0(x0, wp), x0


def burgers_derivatives(t, x, wp: WaveParams, x0=None):
    """Analytic ``(w_x, w_xx)`` along characteristics."""
    if x0 is None:
        _, x0 = burgers_solve(t, x, wp)
    d1 = w0_prime(x0, wp)
    denom = 1.0 + np.asarray(t, dtype=float) * d1
    return d1 / denom, w0_second(x0, wp) / denom**3


def smooth_wave(t, x, ff: FarField, wp: WaveParams, x0_guess=None) -> SmoothWaveEval:
    """Evaluate ``(rho_bar, u_bar)`` and spatial derivatives at time ``t``."""
    g_ = ff.gamma
    s2 = vacuum_edge_speed(ff)
    if wp.w_minus < s2 - 1e-12 or abs(wp.w_plus - float(lambda2(ff.rho_plus, ff.u_plus, ff))) > 1e-10:
        raise DomainError("wave endpoints do not match the far field")
    T = 1.0 + np.asarray(t, dtype=float)
    _, x0 = burgers_solve(T, x, wp, x0_guess=x0_guess)
    g, _ = w0_offsets(x0, wp)
    k = (g_ - 1.0) / (g_ + 1.0)
    c_left = max(k * (wp.w_minus - s2), 0.0)
    c = c_left + k * g
    rho = density_from_sound_speed(c, ff)
    u = s2 + 2.0 * c / (g_ - 1.0)
    w_x, w_xx = burgers_derivatives(T, x, wp, x0=x0)
    c_x = k * w_x
    a = ff.sqrt_agamma
    rho_x = (2.0 / (g_ - 1.0)) / a * (c / a) ** (2.0 / (g_ - 1.0) - 1.0) * c_x
    return SmoothWaveEval(
        rho_bar=rho,
        u_bar=u,
        rho_bar_x=rho_x,
        u_bar_x=2.0 / (g_ + 1.0) * w_x,
        u_bar_xx=2.0 / (g_ + 1.0) * w_xx,
        w=wp.w_minus + g,
        x0=x0,
    )


def smooth_wave_fields(t, x, ff: FarField, wp: WaveParams):
    """Just ``(rho_bar, m_bar)``; used for ghost cells and initial data."""
    ev = smooth_wave(t, x, ff, wp)
    return ev.rho_bar, ev.rho_bar * ev.u_bar


def _x_grid(t, wp: WaveParams, n: int, pad: float):
    T = 1.0 + t
    return np.linspace(wp.w_minus * T - pad, wp.w_plus * T + pad, n)


def _lp(values, x, p):
    if np.isinf(p):
        return float(np.max(np.abs(values)))
    return float(np.trapezoid(np.abs(values) ** p, x) ** (1.0 / p))


@dataclass
class DecayReport:
    p: float
    times: np.ndarray
    ux_norms: np.ndarray
    uxx_norms: np.ndarray
    slope: float
    uxx_linf_time_integral: float
    uxx_reference: float


def ubar_norms(t, ff: FarField, wp: WaveParams, p, n=40001, pad=None):
    """``(||u_bar_x||_p, ||u_bar_xx||_p)`` on a uniform grid spanning the fan."""
    pad = 200.0 / wp.eta if pad is None else pad
    x = _x_grid(t, wp, n, pad)
    ev = smooth_wave(t, x, ff, wp)
    return _lp(ev.u_bar_x, x, p), _lp(ev.u_bar_xx, x, p)


def decay_rates(wp: WaveParams, ff: FarField, p_norm, t_list, n=40001, uxx_integral: bool = True) -> DecayReport:
    """Least-squares slope of ``log ||u_bar_x||_p`` against ``log(1+t)``.

    With ``uxx_integral`` also integrates ``||u_bar_xx||_inf`` from 0 to
    ``max(t_list)`` (61 wave evaluations, NaN otherwise) and reports the
    reference scale ``eta**(2/(4q+1))`` it is bounded by.
    """
    t_list = np.asarray(sorted(t_list), dtype=float)
    if t_list[-1] < 100.0 * max(t_list[0], 1e-300) and t_list[0] > 0:
        raise DomainError("t_list must span at least two decades")
    ux = np.empty(len(t_list))
    uxx = np.empty(len(t_list))
    for i, t in enumerate(t_list):
        ux[i], uxx[i] = ubar_norms(t, ff, wp, p_norm, n=n)
    slope = float(np.polyfit(np.log1p(t_list), np.log(ux), 1)[0])

    integral = math.nan
    if uxx_integral:
        tq = np.concatenate([[0.0], np.geomspace(1e-2, t_list[-1], 60)])
        sup_xx = np.array([ubar_norms(t, ff, wp, np.inf, n=n)[1] for t in tq])
        integral = float(np.trapezoid(sup_xx, tq))
    return DecayReport(
        p=float(p_norm),
        times=t_list,
        ux_norms=ux,
        uxx_norms=uxx,
        slope=slope,
        uxx_linf_time_integral=integral,
        uxx_reference=wp.eta ** (2.0 / (4.0 * wp.q + 1.0)),
    )


def burgers_lp_distance(t, wp: WaveParams, p, n=40001, pad=None):
    """``||w(t) - w^r(./t)||_p`` against the centred Burgers fan."""
    pad = 200.0 / wp.eta if pad is None else pad
    x = np.linspace(wp.w_minus * t - pad, wp.w_plus * t + pad, n)
    w, _ = burgers_solve(t, x, wp)
    wr = np.clip(x / t, wp.w_minus, wp.w_plus)
    return _lp(w - wr, x, p)


def euler_residual(t, x, ff: FarField, wp: WaveParams, h):
    """Centred finite-difference residual of the Euler system for the smooth wave."""
    from .exact_wave import pressure

    def fields(tt, xx):
        rho, m = smooth_wave_fields(tt, xx, ff, wp)
        return rho, m, m * m / rho + pressure(rho, ff)

    rp, mp, _ = fields(t + h, x)
    rm, mm, _ = fields(t - h, x)
    _, qr, fr = fields(t, x + h)
    _, ql, fl = fields(t, x - h)
    r_mass = (rp - rm) / (2 * h) + (qr - ql) / (2 * h)
    r_mom = (mp - mm) / (2 * h) + (fr - fl) / (2 * h)
    return r_mass, r_mom
