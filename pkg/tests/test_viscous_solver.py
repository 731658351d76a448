import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vacwave.approx_wave import WaveParams, smooth_wave
from vacwave.errors import ConfigurationError, DomainError, NonFiniteError, StiffnessError
from vacwave.exact_wave import FarField
from vacwave.manufactured import build as build_manufactured
from vacwave.viscous_solver import (
    RegParams,
    SimState,
    SolverConfig,
    cfl_dt,
    density_floor,
    horizon_warning,
    make_boundary,
    mu_eps,
    regularize_initial,
    run,
    step,
    wave_initial_state,
)


@pytest.fixture
def rp(ff):
    return RegParams.from_epsilon(1e-3, ff)


def small_config(**kw):
    base = dict(x_left=-30.0, x_right=50.0, n_cells=400, t_end=1.0)
    base.update(kw)
    return SolverConfig(**base)


def test_coupling_and_floor(ff, rp):
    assert rp.nu == pytest.approx(1e-2, rel=1e-12)
    # min(nu, eps^2/2) at alpha = 1
    assert rp.floor == pytest.approx(5e-7, rel=1e-12)
    assert density_floor(1e-2, 0.05, 1.5) == pytest.approx(5e-3)


def test_nu_must_follow_epsilon(ff):
    with pytest.raises(ConfigurationError) as exc:
        RegParams.from_epsilon(1e-3, ff, nu=0.05)
    assert any(p.startswith("regularization.nu") for p in exc.value.problems)
    rp = RegParams.from_epsilon(1e-3, ff, nu=0.05, decouple_nu=True)
    assert rp.nu == 0.05 and rp.decoupled


@pytest.mark.parametrize("kw", [dict(epsilon=0.0, nu=0.0, floor=1e-3), dict(epsilon=1e-3, nu=1e-2, floor=0.0),
                                dict(epsilon=1e-3, nu=1e-2, floor=1e-7, theta=0.3)])
def test_regparams_invalid(kw):
    with pytest.raises(ConfigurationError):
        RegParams(**kw)


def test_solver_config_problems_name_fields():
    with pytest.raises(ConfigurationError) as exc:
        SolverConfig(x_left=1.0, x_right=0.0, cfl=1.5, bc="periodic")
    paths = {p.split()[0] for p in exc.value.problems}
    assert {"solver.x_left", "solver.cfl", "solver.bc"} <= paths


def test_simstate_validation():
    with pytest.raises(DomainError):
        SimState(0.0, 0.1, 0.0, np.ones(20), np.ones(19))
    with pytest.raises(DomainError):
        SimState(0.0, 0.1, 0.0, np.ones(8), np.ones(8))


def test_mu_eps(ff, rp):
    assert float(mu_eps(4.0, rp, ff)) == pytest.approx(4.0 + 2e-3)


@pytest.mark.parametrize("recon", ["constant", "muscl"])
@pytest.mark.parametrize("integrator", ["euler", "ssprk2"])
def test_constant_state_preserved(ff, rp, wp, recon, integrator):
    cfg = small_config(reconstruction=recon, integrator=integrator, t_end=0.3)
    n = cfg.n_cells
    st0 = SimState(0.0, cfg.dx, cfg.x_left, np.full(n, 0.6), np.full(n, 0.6 * -0.4))
    bc = lambda t, xg: (np.full(xg.shape, 0.6), np.full(xg.shape, 0.6 * -0.4))  # noqa: E731
    res = run(cfg, rp, ff, wp, state=st0, boundary=bc)
    assert res.n_steps > 10
    np.testing.assert_array_equal(res.state.rho, st0.rho)
    assert np.max(np.abs(res.state.m - st0.m)) <= 1e-14 * res.n_steps


def test_mass_balance_per_step(ff, rp, wp):
    cfg = small_config(t_end=2.0)
    st0 = wave_initial_state(rp, ff, wp, cfg)
    st0.rho *= 1.0 + 0.1 * np.exp(-st0.x**2)
    res = run(cfg, rp, ff, wp, state=st0)
    assert res.max_mass_defect < 1e-10
    assert res.n_clamped == 0


def test_smooth_wave_stays_close(ff, rp, wp):
    cfg = small_config(t_end=2.0)
    res = run(cfg, rp, ff, wp)
    ev = smooth_wave(2.0, res.state.x, ff, wp)
    assert np.max(np.abs(res.state.rho - ev.rho_bar)) < 0.02


def test_manufactured_second_order(ff, rp):
    wp = WaveParams.for_far_field(ff, nu=rp.nu)
    ms = build_manufactured(ff, rp)
    errs = []
    for n in (50, 100):
        cfg = SolverConfig(x_left=-3.0, x_right=3.0, n_cells=n, t_end=0.25, integrator="ssprk2")
        x = cfg.centers()
        res = run(cfg, rp, ff, wp, state=SimState(0.0, cfg.dx, cfg.x_left, ms.rho(0, x), ms.m(0, x)),
                  boundary=ms.boundary, source=ms.source)
        errs.append(np.sum(np.abs(res.state.rho - ms.rho(0.25, x))) * cfg.dx)
    assert math.log2(errs[0] / errs[1]) > 1.7


def test_cfl_dt_scales_with_dx(ff, rp, wp):
    dts = []
    for n in (200, 400):
        cfg = small_config(n_cells=n)
        dts.append(cfl_dt(wave_initial_state(rp, ff, wp, cfg), rp, ff, 0.5))
    assert 1.9 < dts[0] / dts[1] < 4.1
    st0 = wave_initial_state(rp, ff, wp, small_config())
    assert dts[1] <= 0.5 * st0.dx / np.max(np.abs(st0.u) + np.sqrt(2.0 * st0.rho))


def test_stiffness_abort(rp):
    stiff = FarField(B=1e13)
    wp = WaveParams.for_far_field(stiff, nu=rp.nu)
    st0 = wave_initial_state(rp, stiff, wp, small_config())
    with pytest.raises(StiffnessError):
        cfl_dt(st0, rp, stiff, 0.5)


def test_nonfinite_abort_reports_cell(ff, rp, wp):
    cfg = small_config()
    st0 = wave_initial_state(rp, ff, wp, cfg)
    st0.m[123] = np.nan
    with pytest.raises(NonFiniteError) as exc:
        step(st0, rp, ff, wp, cfg, dt=1e-4)
    assert abs(exc.value.index - 123) <= 3


def test_floor_clamp_keeps_positivity(ff, rp, wp):
    cfg = small_config(reconstruction="constant")
    st0 = wave_initial_state(rp, ff, wp, cfg)
    st0.rho[200:203] = rp.floor
    st0.m[200:203] = st0.rho[200:203] * -5.0
    new, info = step(st0, rp, ff, wp, cfg)
    assert np.all(new.rho >= rp.floor)
    assert info.n_clamped >= 0 and info.clamped_mass >= 0


def test_observation_schedule(ff, rp, wp):
    cfg = small_config(t_end=1.0)
    seen = []
    res = run(cfg, rp, ff, wp, observers=[lambda s: seen.append(s.t)], observe_times=[0.0, 0.25, 0.5])
    assert seen == [0.0, 0.25, 0.5, 1.0] == res.times
    seen.clear()
    run(cfg, rp, ff, wp, observers=[lambda s: seen.append(s.t)], observe_times=[0.5], state=res.state,
        resume=True)
    assert seen == []


def test_horizon_warning(ff, wp):
    assert horizon_warning(1e-3, 80.0) is None
    assert "epsilon*ln(1+t_end)" in horizon_warning(0.5, 80.0)
    rp = RegParams.from_epsilon(0.5, ff)
    wp5 = WaveParams.for_far_field(ff, nu=rp.nu)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = run(small_config(t_end=1e-3), rp, ff, wp5, observe_times=[])
    assert res.warnings == [] and not caught
    with pytest.warns(RuntimeWarning), pytest.raises(_Stop):
        run(small_config(t_end=20.0), rp, ff, wp5, step_hook=_stop_after(2))


class _Stop(Exception):
    pass


def _stop_after(n):
    count = [0]

    def hook(st, info):
        count[0] += 1
        if count[0] >= n:
            raise _Stop

    return hook


def test_regularize_initial_checks_far_field(ff, rp, wp):
    cfg = small_config()
    with pytest.raises(ConfigurationError):
        regularize_initial(lambda x: np.ones_like(x), lambda x: np.zeros_like(x), rp, ff, wp, cfg)


def test_regularize_initial_floor_and_vacuum_momentum(ff, rp, wp):
    cfg = small_config()

    def rho0(x):
        ev = smooth_wave(0.0, x, ff, wp)
        return np.where(np.abs(x) < 1.0, 0.0, ev.rho_bar)

    st0 = regularize_initial(rho0, lambda x: smooth_wave(0.0, x, ff, wp).m_bar, rp, ff, wp, cfg)
    hole = np.abs(st0.x) < 1.0
    assert np.all(st0.rho[hole] == rp.floor) and np.all(st0.m[hole] == 0.0)


def test_fixed_boundary_uses_cutoff_state(ff, rp, wp):
    cfg = small_config(bc="fixed")
    bc = make_boundary(cfg, rp, ff, wp)
    rho, m = bc(0.0, np.array([cfg.x_left - 0.1, cfg.x_right + 0.1]))
    assert rho[0] == pytest.approx(rp.nu) and rho[1] == ff.rho_plus and m[1] == 0.0


@given(st.floats(0.05, 0.45))
def test_step_conserves_mass_random_bump(amp):
    ff = FarField()
    rp = RegParams.from_epsilon(1e-2, ff)
    wp = WaveParams.for_far_field(ff, nu=rp.nu)
    cfg = SolverConfig(x_left=-20.0, x_right=30.0, n_cells=100, t_end=1.0)
    st0 = wave_initial_state(rp, ff, wp, cfg)
    st0.rho = st0.rho * (1.0 + amp * np.sin(st0.x) * np.exp(-(st0.x / 5) ** 2))
    new, info = step(st0, rp, ff, wp, cfg)
    defect = new.mass() - info.clamped_mass - st0.mass() - info.boundary_mass_flux * info.dt
    assert abs(defect) < 1e-12


def test_mu_eps_examples(ff):
    rp = RegParams.from_epsilon(0.01, ff, nu=0.5, decouple_nu=True)
    assert float(mu_eps(0.0, rp, ff)) == 0.0
    assert float(mu_eps(1.0, rp, ff)) == pytest.approx(1.01)


def test_viscous_bound_by_hand(ff, wp):
    # epsilon = 0 and mu = rho: kinematic viscosity 1, bound dx^2/2
    rp0 = RegParams(epsilon=0.0, nu=0.01, floor=1e-6, decoupled=True)
    dts = []
    for n in (1000, 2000):
        cfg = SolverConfig(x_left=0.0, x_right=10.0, n_cells=n)
        st0 = SimState(0.0, cfg.dx, 0.0, np.full(n, 0.5), np.zeros(n))
        dts.append(cfl_dt(st0, rp0, ff, 0.5))
        assert dts[-1] == pytest.approx(0.5 * cfg.dx**2 / 2, rel=1e-14)
    assert dts[0] / dts[1] == pytest.approx(4.0)


def test_hyperbolic_bound_on_coarse_grid(ff, rp):
    n = 20
    st0 = SimState(0.0, 5.0, 0.0, np.full(n, 1.0), np.full(n, 2.0))
    assert cfl_dt(st0, rp, ff, 0.5) == pytest.approx(0.5 * 5.0 / (2.0 + math.sqrt(2.0)))


def test_zero_horizon_single_observation(ff, rp, wp):
    seen = []
    res = run(small_config(t_end=0.0), rp, ff, wp, observers=[lambda s: seen.append(s.t)])
    assert seen == [0.0] and res.n_steps == 0


def test_horizon_boundary_cases():
    assert horizon_warning(0.1, 1e4) is None
    assert horizon_warning(0.2, 1e4) is not None
