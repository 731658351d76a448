"""Euler 2-rarefaction wave whose left state is vacuum.

All functions are vectorised over numpy arrays and pure in their inputs.
The sound speed is ``c(rho) = sqrt(A*gamma) * rho**((gamma-1)/2)`` so that
``lambda2 = u + c`` and ``sigma2 = u - 2c/(gamma-1)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError

ADMISSIBILITY = "1 < gamma <= 2 and 1 <= alpha <= (gamma+1)/2"


@dataclass(frozen=True)
class FarField:
    """Right far-field state and gas constants; the left state is vacuum."""

    rho_plus: float = 1.0
    u_plus: float = 0.0
    gamma: float = 2.0
    A: float = 1.0
    alpha: float = 1.0
    B: float = 1.0

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ConfigurationError("; ".join(problems), problems)

    def problems(self) -> list[str]:
        out = []
        if not self.rho_plus > 0:
            out.append(f"rho_plus must be > 0 (got {self.rho_plus})")
        if not (1.0 < self.gamma <= 2.0):
            out.append(f"gamma={self.gamma} violates condition (alpha): {ADMISSIBILITY}")
        elif not (1.0 <= self.alpha <= (self.gamma + 1.0) / 2.0):
            out.append(f"alpha={self.alpha} violates condition (alpha): {ADMISSIBILITY}")
        if not self.A > 0:
            out.append(f"A must be > 0 (got {self.A})")
        if not self.B > 0:
            out.append(f"B must be > 0 (got {self.B})")
        return out

    @property
    def sqrt_agamma(self) -> float:
        return float(np.sqrt(self.A * self.gamma))


@dataclass(frozen=True)
class FanState:
    """Density, velocity and momentum of the wave; ``m == 0`` wherever ``rho == 0``.

    On the vacuum side ``u`` carries the vacuum-edge speed ``u_minus`` as a
    plotting convention; the flag ``u_is_convention`` marks those entries.
    """

    rho: np.ndarray
    u: np.ndarray
    m: np.ndarray
    u_is_convention: np.ndarray


def _check_rho(rho):
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise DomainError("density must be nonnegative")
    return rho


def sound_speed(rho, ff: FarField):
    rho = _check_rho(rho)
    return ff.sqrt_agamma * rho ** ((ff.gamma - 1.0) / 2.0)


def density_from_sound_speed(c, ff: FarField):
    """Inverse of :func:`sound_speed` for ``c >= 0``."""
    return (np.asarray(c, dtype=float) / ff.sqrt_agamma) ** (2.0 / (ff.gamma - 1.0))


def pressure(rho, ff: FarField):
    rho = _check_rho(rho)
    return ff.A * rho**ff.gamma


def lambda2(rho, u, ff: FarField):
    return np.asarray(u, dtype=float) + sound_speed(rho, ff)


def sigma2(rho, u, ff: FarField):
    return np.asarray(u, dtype=float) - 2.0 * sound_speed(rho, ff) / (ff.gamma - 1.0)


def vacuum_edge_speed(ff: FarField) -> float:
    """Speed ``u_-`` of gas entering the vacuum, from ``sigma2(0, u_-) = sigma2(rho+, u+)``."""
    return float(sigma2(ff.rho_plus, ff.u_plus, ff))


def fan_from_speed(xi, ff: FarField):
    """Invert ``lambda2(rho, u) = xi`` together with ``sigma2(rho, u) = sigma2_+``.

    Valid for ``xi >= sigma2_+``; returns ``(rho, u, c)``.
    """
    g = ff.gamma
    s2 = vacuum_edge_speed(ff)
    c = (g - 1.0) * (np.asarray(xi, dtype=float) - s2) / (g + 1.0)
    c = np.maximum(c, 0.0)
    u = s2 + 2.0 * c / (g - 1.0)
    return density_from_sound_speed(c, ff), u, c


def exact_wave(xi, ff: FarField) -> FanState:
    """Self-similar 2-rarefaction fan at ``xi = x/t``."""
    xi = np.asarray(xi, dtype=float)
    u_minus = vacuum_edge_speed(ff)
    lam_plus = float(lambda2(ff.rho_plus, ff.u_plus, ff))

    rho_fan, u_fan, _ = fan_from_speed(np.clip(xi, u_minus, lam_plus), ff)
    vac = xi < u_minus
    right = xi >= lam_plus
    rho = np.where(vac, 0.0, np.where(right, ff.rho_plus, rho_fan))
    u = np.where(vac, u_minus, np.where(right, ff.u_plus, u_fan))
    m = np.where(rho > 0, rho * u, 0.0)
    return FanState(rho=rho, u=u, m=m, u_is_convention=np.asarray(vac))


def cutoff_state(nu: float, ff: FarField) -> FanState:
    """Point ``(nu, u(nu))`` on the 2-rarefaction curve through ``(rho+, u+)``."""
    if not (0.0 < nu < ff.rho_plus):
        raise DomainError(f"cut-off density must lie in (0, rho_plus), got {nu}")
    u_nu = 2.0 * float(sound_speed(nu, ff)) / (ff.gamma - 1.0) + vacuum_edge_speed(ff)
    return FanState(
        rho=np.asarray(nu, dtype=float),
        u=np.asarray(u_nu),
        m=np.asarray(nu * u_nu),
        u_is_convention=np.asarray(False),
    )


def cutoff_wave(xi, nu: float, ff: FarField) -> FanState:
    """Non-vacuum fan joining ``cutoff_state(nu)`` to ``(rho+, u+)``."""
    left = cutoff_state(nu, ff)
    xi = np.asarray(xi, dtype=float)
    w_left = float(lambda2(left.rho, left.u, ff))
    lam_plus = float(lambda2(ff.rho_plus, ff.u_plus, ff))
    rho_fan, u_fan, _ = fan_from_speed(np.clip(xi, w_left, lam_plus), ff)
    rho = np.where(xi < w_left, nu, np.where(xi >= lam_plus, ff.rho_plus, rho_fan))
    u = np.where(xi < w_left, float(left.u), np.where(xi >= lam_plus, ff.u_plus, u_fan))
    return FanState(rho=rho, u=u, m=rho * u, u_is_convention=np.zeros(xi.shape, dtype=bool))
