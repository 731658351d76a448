"""Finite-volume integration of the regularised viscous system

    rho_t + m_x = 0,
    m_t + (m^2/rho + p(rho))_x = (mu_eps(rho) u_x)_x,   mu_eps = B rho^alpha + eps rho^(1/2),

on a truncated interval with ghost cells supplied by a boundary provider.
Convective fluxes are Rusanov (local Lax-Friedrichs) with optional MUSCL
reconstruction of ``(rho, u)``; diffusion is a centred three-point stencil
with the face viscosity taken at the arithmetic-mean density.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .approx_wave import WaveParams, smooth_wave, smooth_wave_fields
from .errors import ConfigurationError, DomainError, NonFiniteError, StiffnessError
from .exact_wave import FarField, cutoff_state, pressure

NGHOST = 2
DT_MIN = 1e-12


@dataclass(frozen=True)
class RegParams:
    epsilon: float
    nu: float
    floor: float
    theta: float = 0.5
    decoupled: bool = False

    def __post_init__(self):
        problems = []
        if self.theta != 0.5:
            problems.append(f"theta must be 1/2, got {self.theta}")
        if self.epsilon < 0 or (self.epsilon == 0 and not self.decoupled):
            problems.append(f"epsilon must be > 0, got {self.epsilon}")
        if not self.decoupled and not math.isclose(self.nu, self.epsilon ** (2.0 / 3.0), rel_tol=1e-9):
            problems.append(
                f"nu={self.nu} must equal epsilon^(2/3)={self.epsilon ** (2.0 / 3.0)} (use decouple_nu to override)"
            )
        if not self.floor > 0:
            problems.append("density floor must be positive")
        if problems:
            raise ConfigurationError("; ".join(problems), problems)

    @classmethod
    def from_epsilon(cls, epsilon: float, ff: FarField, nu: float | None = None, decouple_nu: bool = False):
        coupled = epsilon ** (2.0 / 3.0)
        if nu is None:
            nu = coupled
        elif not decouple_nu and not math.isclose(nu, coupled, rel_tol=1e-9):
            raise ConfigurationError(
                f"nu={nu} must equal epsilon^(2/3)={coupled} (use decouple_nu to override)",
                [f"regularization.nu: {nu} != epsilon^(2/3) = {coupled}"],
            )
        return cls(epsilon=epsilon, nu=nu, floor=density_floor(epsilon, nu, ff.alpha), decoupled=decouple_nu)


def density_floor(epsilon: float, nu: float, alpha: float) -> float:
    return min(nu, 0.5 * epsilon ** (2.0 / (2.0 * alpha - 1.0)))


@dataclass
class SimState:
    t: float
    dx: float
    x0: float
    rho: np.ndarray
    m: np.ndarray

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        self.m = np.asarray(self.m, dtype=float)
        if self.rho.shape != self.m.shape or self.rho.ndim != 1 or len(self.rho) < 16:
            raise DomainError("rho and m must be 1-D arrays of equal length >= 16")

    @property
    def x(self):
        return self.x0 + self.dx * (np.arange(len(self.rho)) + 0.5)

    @property
    def u(self):
        return self.m / self.rho

    def mass(self) -> float:
        return float(np.sum(self.rho) * self.dx)

    def copy(self):
        return SimState(self.t, self.dx, self.x0, self.rho.copy(), self.m.copy())


@dataclass(frozen=True)
class SolverConfig:
    x_left: float = -60.0
    x_right: float = 160.0
    n_cells: int = 4400
    cfl: float = 0.5
    t_end: float = 80.0
    bc: str = "wave-following"
    reconstruction: str = "muscl"
    integrator: str = "euler"

    def __post_init__(self):
        problems = []
        if not self.x_left < self.x_right:
            problems.append("solver.x_left must be < solver.x_right")
        if not 0 < self.cfl < 1:
            problems.append("solver.cfl must lie in (0, 1)")
        if self.n_cells < 16:
            problems.append("solver.n_cells must be >= 16")
        if self.t_end < 0:
            problems.append("solver.t_end must be >= 0")
        if self.bc not in ("fixed", "wave-following"):
            problems.append(f"solver.bc must be 'fixed' or 'wave-following', got {self.bc!r}")
        if self.reconstruction not in ("constant", "muscl"):
            problems.append(f"solver.reconstruction must be 'constant' or 'muscl', got {self.reconstruction!r}")
        if self.integrator not in ("euler", "ssprk2"):
            problems.append(f"solver.integrator must be 'euler' or 'ssprk2', got {self.integrator!r}")
        if problems:
            raise ConfigurationError("; ".join(problems), problems)

    @property
    def dx(self) -> float:
        return (self.x_right - self.x_left) / self.n_cells

    def centers(self):
        return self.x_left + self.dx * (np.arange(self.n_cells) + 0.5)


# boundary(t, x_ghost) -> (rho, m); source(t, x) -> (s_rho, s_m)
Boundary = Callable[[float, np.ndarray], tuple]
Source = Callable[[float, np.ndarray], tuple]


def mu_eps(rho, rp: RegParams, ff: FarField):
    rho = np.asarray(rho, dtype=float)
    return ff.B * rho**ff.alpha + rp.epsilon * np.sqrt(rho)


class WaveBoundary:
    """Ghost values from the approximate wave, warm-starting each characteristic
    solve from the previous call's feet (ghost positions never move)."""

    def __init__(self, ff: FarField, wp: WaveParams):
        self.ff, self.wp = ff, wp
        self._x = None
        self._x0 = None

    def __call__(self, t, xg):
        guess = self._x0 if self._x is not None and np.array_equal(self._x, xg) else None
        ev = smooth_wave(t, xg, self.ff, self.wp, x0_guess=guess)
        self._x, self._x0 = np.array(xg, copy=True), ev.x0
        return ev.rho_bar, ev.rho_bar * ev.u_bar


def make_boundary(config: SolverConfig, rp: RegParams, ff: FarField, wp: WaveParams) -> Boundary:
    if config.bc == "wave-following":
        return WaveBoundary(ff, wp)
    left = cutoff_state(rp.nu, ff)
    rl, ml = float(left.rho), float(left.m)
    rr, mr = ff.rho_plus, ff.rho_plus * ff.u_plus

    def fixed(t, xg):
        on_left = xg < 0.5 * (config.x_left + config.x_right)
        return np.where(on_left, rl, rr), np.where(on_left, ml, mr)

    return fixed


def regularize_initial(rho0, m0, rp: RegParams, ff: FarField, wp: WaveParams, config: SolverConfig,
                       far_field_tol: float = 1e-3) -> SimState:
    """Sample initial profiles at cell centres and apply the density floor.

    ``rho0``/``m0`` are callables of ``x``. Their values at the domain ends
    must match the approximate wave (whose left limit is the cut-off state)
    within ``far_field_tol`` relative.
    """
    x = config.centers()
    rho = np.asarray(rho0(x), dtype=float)
    m = np.asarray(m0(x), dtype=float)
    ends = x[[0, -1]]
    rb, mb = smooth_wave_fields(0.0, ends, ff, wp)
    scale = np.maximum(np.abs(rb), rp.nu)
    bad = []
    if np.any(np.abs(rho[[0, -1]] - rb) > far_field_tol * scale):
        bad.append(f"density far fields {rho[[0, -1]]} do not match {rb}")
    if np.any(np.abs(m[[0, -1]] - mb) > far_field_tol * np.maximum(np.abs(mb), rp.nu)):
        bad.append(f"momentum far fields {m[[0, -1]]} do not match {mb}")
    if bad:
        raise ConfigurationError("; ".join(bad), bad)
    m = np.where(rho <= 0, 0.0, m)
    rho = np.maximum(rho, rp.floor)
    return SimState(t=0.0, dx=config.dx, x0=config.x_left, rho=rho, m=m)


def wave_initial_state(rp: RegParams, ff: FarField, wp: WaveParams, config: SolverConfig) -> SimState:
    return regularize_initial(
        lambda x: smooth_wave_fields(0.0, x, ff, wp)[0],
        lambda x: smooth_wave_fields(0.0, x, ff, wp)[1],
        rp, ff, wp, config,
    )


def _mc_slope(q):
    """Monotonised-central limited slopes for ``q[1:-1]``."""
    dm = q[1:-1] - q[:-2]
    dp = q[2:] - q[1:-1]
    dc = 0.5 * (dm + dp)
    s = np.sign(dc) * np.minimum(np.minimum(2 * np.abs(dm), 2 * np.abs(dp)), np.abs(dc))
    return np.where(dm * dp > 0, s, 0.0)


def _flux(rho, u, ff):
    m = rho * u
    return m, m * u + pressure(rho, ff)


@dataclass
class StepInfo:
    dt: float
    boundary_mass_flux: float  # net inflow rate of mass through the two end faces
    clamped_mass: float
    n_clamped: int


def _extend(state: SimState, t: float, boundary: Boundary):
    n = len(state.rho)
    dx = state.dx
    xg = np.concatenate([
        state.x0 - dx * (np.arange(NGHOST, 0, -1) - 0.5),
        state.x0 + dx * (n + np.arange(NGHOST) + 0.5),
    ])
    rg, mg = boundary(t, xg)
    rg = np.asarray(rg, dtype=float)
    mg = np.asarray(mg, dtype=float)
    R = np.concatenate([rg[:NGHOST], state.rho, rg[NGHOST:]])
    M = np.concatenate([mg[:NGHOST], state.m, mg[NGHOST:]])
    return R, M


def _rhs(rho, m, t, state, rp, ff, config, boundary, source):
    tmp = SimState(t, state.dx, state.x0, rho, m) if rho is not state.rho else state
    R, M = _extend(tmp, t, boundary)
    U = M / R
    dx = state.dx
    # faces between extended cells k and k+1, k = NGHOST-1 .. NGHOST+n-1
    if config.reconstruction == "muscl":
        sr = _mc_slope(R)
        su = _mc_slope(U)
        rl = R[1:-2] + 0.5 * sr[:-1]
        rr = R[2:-1] - 0.5 * sr[1:]
        ul = U[1:-2] + 0.5 * su[:-1]
        ur = U[2:-1] - 0.5 * su[1:]
    else:
        rl, rr = R[1:-2], R[2:-1]
        ul, ur = U[1:-2], U[2:-1]
    fl_r, fl_m = _flux(rl, ul, ff)
    fr_r, fr_m = _flux(rr, ur, ff)
    cl = np.sqrt(ff.A * ff.gamma * rl ** (ff.gamma - 1.0))
    cr = np.sqrt(ff.A * ff.gamma * rr ** (ff.gamma - 1.0))
    a = np.maximum(np.abs(ul) + cl, np.abs(ur) + cr)
    F_r = 0.5 * (fl_r + fr_r) - 0.5 * a * (rr - rl)
    F_m = 0.5 * (fl_m + fr_m) - 0.5 * a * (rr * ur - rl * ul)

    Rc, Uc = R[1:-1], U[1:-1]
    G = mu_eps(0.5 * (Rc[:-1] + Rc[1:]), rp, ff) * (Uc[1:] - Uc[:-1]) / dx

    d_rho = -(F_r[1:] - F_r[:-1]) / dx
    d_m = -(F_m[1:] - F_m[:-1]) / dx + (G[1:] - G[:-1]) / dx
    if source is not None:
        s_r, s_m = source(t, state.x)
        d_rho = d_rho + s_r
        d_m = d_m + s_m
    return d_rho, d_m, float(F_r[0] - F_r[-1])


def cfl_dt(state: SimState, rp: RegParams, ff: FarField, cfl: float) -> float:
    """Explicit step bound ``cfl * min(dx / max(|u|+c), dx^2 / (2 max mu/rho))``.

    The kinematic viscosity is checked at cells and at interior faces (face
    viscosity over the smaller adjacent density), matching the stencil.
    """
    if len(state.rho) == 0:
        raise DomainError("empty grid")
    rho, u = state.rho, state.u
    c = np.sqrt(ff.A * ff.gamma * rho ** (ff.gamma - 1.0))
    speed = float(np.max(np.abs(u) + c))
    kin_cell = mu_eps(rho, rp, ff) / rho
    kin_face = mu_eps(0.5 * (rho[:-1] + rho[1:]), rp, ff) / np.minimum(rho[:-1], rho[1:])
    kin = float(max(np.max(kin_cell), np.max(kin_face)))
    dx = state.dx
    hyp = dx / speed if speed > 0 else math.inf
    visc = dx * dx / (2.0 * kin) if kin > 0 else math.inf
    dt = cfl * min(hyp, visc)
    if not dt >= DT_MIN:
        raise StiffnessError(f"time step {dt} below {DT_MIN}")
    return dt


def _check_finite(rho, m, t):
    bad = ~(np.isfinite(rho) & np.isfinite(m))
    if bad.any():
        i = int(np.nonzero(bad)[0][0])
        raise NonFiniteError(f"non-finite value in cell {i} at t={t}", i)


def step(state: SimState, rp: RegParams, ff: FarField, wp: WaveParams, config: SolverConfig,
         boundary: Boundary | None = None, source: Source | None = None, dt: float | None = None):
    """Advance one explicit step; returns ``(new_state, StepInfo)``."""
    boundary = boundary or make_boundary(config, rp, ff, wp)
    if dt is None:
        dt = cfl_dt(state, rp, ff, config.cfl)
    if dt < DT_MIN:
        raise StiffnessError(f"time step {dt} below {DT_MIN}")
    t = state.t
    d_r, d_m, b0 = _rhs(state.rho, state.m, t, state, rp, ff, config, boundary, source)
    rho1 = state.rho + dt * d_r
    m1 = state.m + dt * d_m
    bflux = b0
    if config.integrator == "ssprk2":
        _check_finite(rho1, m1, t)
        safe = np.maximum(rho1, rp.floor)
        d_r2, d_m2, b1 = _rhs(safe, m1, t + dt, state, rp, ff, config, boundary, source)
        rho1 = 0.5 * state.rho + 0.5 * (safe + dt * d_r2)
        m1 = 0.5 * state.m + 0.5 * (m1 + dt * d_m2)
        bflux = 0.5 * (b0 + b1)
    _check_finite(rho1, m1, t + dt)
    low = rho1 < rp.floor
    clamped = 0.0
    if low.any():
        clamped = float(np.sum(rp.floor - rho1[low]) * state.dx)
        vel = np.where(rho1[low] > 0, m1[low] / np.where(rho1[low] > 0, rho1[low], 1.0), 0.0)
        rho1[low] = rp.floor
        m1[low] = rp.floor * vel
    new = SimState(t + dt, state.dx, state.x0, rho1, m1)
    return new, StepInfo(dt=dt, boundary_mass_flux=bflux, clamped_mass=clamped, n_clamped=int(low.sum()))


@dataclass
class RunResult:
    times: list = field(default_factory=list)
    state: SimState | None = None
    n_steps: int = 0
    clamped_mass: float = 0.0
    n_clamped: int = 0
    max_rho: float = 0.0
    max_mass_defect: float = 0.0
    warnings: list = field(default_factory=list)


def horizon_warning(epsilon: float, t_end: float) -> str | None:
    prod = epsilon * math.log1p(t_end)
    if prod > 1.0:
        return f"epsilon*ln(1+t_end) = {prod:.4g} > 1; uniform-in-time bounds are not guaranteed"
    return None


def run(config: SolverConfig, rp: RegParams, ff: FarField, wp: WaveParams,
        observers: Sequence[Callable] = (), observe_times: Sequence[float] | None = None,
        state: SimState | None = None, boundary: Boundary | None = None, source: Source | None = None,
        step_hook: Callable | None = None, resume: bool = False) -> RunResult:
    """Integrate to ``config.t_end``, calling every observer at each observation time.

    Steps are shortened to land exactly on observation times; ``t_end`` is
    always observed. With ``resume=True`` the given ``state`` is a checkpoint
    already observed at its own time, so only later times are visited.
    """
    result = RunResult()
    msg = horizon_warning(rp.epsilon, config.t_end)
    if msg:
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        result.warnings.append(msg)
    boundary = boundary or make_boundary(config, rp, ff, wp)
    if state is None:
        state = wave_initial_state(rp, ff, wp, config)
    times = {float(t) for t in (observe_times or ())} | {float(config.t_end)}
    schedule = sorted(t for t in times if (t > state.t if resume else t >= state.t) and t <= config.t_end)
    result.max_rho = float(np.max(state.rho))

    for t_obs in schedule:
        while state.t < t_obs:
            dt = cfl_dt(state, rp, ff, config.cfl)
            remaining = t_obs - state.t
            last = dt >= remaining or remaining - dt < 1e-9 * dt
            if last:
                dt = remaining
            mass0 = state.mass()
            state, info = step(state, rp, ff, wp, config, boundary=boundary, source=source, dt=dt)
            if last:
                state.t = t_obs
            result.n_steps += 1
            result.clamped_mass += info.clamped_mass
            result.n_clamped += info.n_clamped
            if source is None:
                defect = abs(state.mass() - info.clamped_mass - mass0 - info.boundary_mass_flux * dt)
                result.max_mass_defect = max(result.max_mass_defect, defect)
            result.max_rho = max(result.max_rho, float(np.max(state.rho)))
            if step_hook is not None:
                step_hook(state, info)
        result.times.append(state.t)
        for obs in observers:
            obs(state)
    result.state = state
    return result
