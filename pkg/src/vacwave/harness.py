"""Scenario configuration, run driver, sweeps and refinement studies.

Config files are TOML with the sections ``far_field``, ``wave``,
``regularization``, ``solver``, ``perturbation``, ``observe`` and
``diagnostics`` (see ``configs/s1.toml``). Every output a run writes is a
deterministic function of the resolved config.
"""
from __future__ import annotations

import copy
import csv
import json
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .approx_wave import WaveParams, smooth_wave
from .diagnostics import (
    Accumulators,
    FunctionalReport,
    _check_fparams,
    default_s,
    functional_report,
    region_check,
    sup_and_lp_distance,
    vacuum_persistence,
)
from .errors import ConfigurationError, SolverAbort
from .exact_wave import FarField
from .manufactured import build as build_manufactured
from .viscous_solver import (
    RegParams,
    SimState,
    SolverConfig,
    horizon_warning,
    make_boundary,
    regularize_initial,
    run,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2
PERTURBATIONS = ("none", "sine-bump", "custom")


@dataclass(frozen=True)
class Perturbation:
    """Initial perturbation of the approximate wave.

    ``sine-bump`` multiplies the density by ``1 + amplitude*sin(x)*exp(-(x/width)^2)``
    and keeps the wave velocity. ``custom`` reads a CSV with columns
    ``x,rho,u`` and interpolates it linearly, falling back to the wave
    outside the tabulated range.
    """

    kind: str = "none"
    amplitude: float = 0.0
    width: float = 10.0
    path: str | None = None

    def problems(self) -> list[str]:
        out = []
        if self.kind not in PERTURBATIONS:
            out.append(f"perturbation.kind: must be one of {PERTURBATIONS}, got {self.kind!r}")
        if self.kind == "sine-bump":
            if not 0.0 <= self.amplitude < 1.0:
                out.append(f"perturbation.amplitude: must lie in [0, 1), got {self.amplitude}")
            if not self.width > 0:
                out.append(f"perturbation.width: must be > 0, got {self.width}")
        if self.kind == "custom" and (self.path is None or not Path(self.path).is_file()):
            out.append(f"perturbation.path: file not found: {self.path!r}")
        return out


@dataclass(frozen=True)
class DiagnosticsParams:
    s: float | None = None  # None means b + 1.5
    l: int = 1
    sigma: tuple = (0.25,)
    p: tuple = (math.inf,)
    cubic_moment: bool = False


@dataclass(frozen=True)
class Scenario:
    name: str
    ff: FarField
    wp: WaveParams
    rp: RegParams
    solver: SolverConfig
    perturbation: Perturbation = Perturbation()
    observe_times: tuple = ()
    diagnostics: DiagnosticsParams = DiagnosticsParams()


@dataclass(frozen=True)
class SweepSpec:
    base: Scenario
    axis: str
    values: tuple

    def __post_init__(self):
        if _lookup(scenario_to_dict(self.base), self.axis) is _MISSING:
            raise ConfigurationError(f"sweep axis {self.axis!r} names no parameter",
                                     [f"sweep.axis: unknown parameter {self.axis!r}"])
        if not self.values:
            raise ConfigurationError("sweep needs at least one value", ["sweep.values: empty"])


# -- config parsing -----------------------------------------------------------

_SECTIONS = {
    "far_field": [f.name for f in fields(FarField)],
    "wave": ["eta", "q"],
    "regularization": ["epsilon", "nu", "decouple_nu"],
    "solver": [f.name for f in fields(SolverConfig)],
    "perturbation": [f.name for f in fields(Perturbation)],
    "observe": ["times", "count"],
    "diagnostics": [f.name for f in fields(DiagnosticsParams)],
}
_MISSING = object()


def _lookup(d, path):
    for key in path.split("."):
        if not isinstance(d, dict) or key not in d:
            return _MISSING
        d = d[key]
    return d


def _set(d, path, value):
    *head, last = path.split(".")
    for key in head:
        d = d.setdefault(key, {})
    d[last] = value


def _prefixed(section, problems):
    out = []
    for p in problems:
        if p.startswith(section + "."):
            head, _, rest = p.partition(" ")
            out.append(p if head.endswith(":") else f"{head}: {rest}")
            continue
        m = re.match(r"([A-Za-z_]\w*)", p)
        name = m.group(1) if m and m.group(1) in _SECTIONS.get(section, ()) else None
        out.append(f"{section}.{name}: {p}" if name else f"{section}: {p}")
    return out


def scenario_from_dict(cfg: dict, decouple_nu: bool = False, base_dir: str | Path | None = None) -> Scenario:
    """Validate a nested config dict; all problems are reported together with field paths."""
    problems = []
    for key, val in cfg.items():
        if key == "name":
            continue
        if key not in _SECTIONS:
            problems.append(f"{key}: unknown section")
        elif not isinstance(val, dict):
            problems.append(f"{key}: must be a table")
        else:
            problems += [f"{key}.{k}: unknown key" for k in val if k not in _SECTIONS[key]]
    if problems:
        raise ConfigurationError("; ".join(problems), problems)
    sec = {k: dict(cfg.get(k, {})) for k in _SECTIONS}

    ff = None
    try:
        ff = FarField(**{k: float(v) for k, v in sec["far_field"].items()})
    except ConfigurationError as e:
        problems += _prefixed("far_field", e.problems)

    solver = None
    try:
        solver = SolverConfig(**sec["solver"])
    except (ConfigurationError, TypeError) as e:
        problems += _prefixed("solver", getattr(e, "problems", None) or [str(e)])

    reg = sec["regularization"]
    rp = None
    if "epsilon" not in reg:
        problems.append("regularization.epsilon: required")
    elif ff is not None:
        try:
            rp = RegParams.from_epsilon(float(reg["epsilon"]), ff, nu=reg.get("nu"),
                                        decouple_nu=bool(reg.get("decouple_nu", False)) or decouple_nu)
        except ConfigurationError as e:
            problems += _prefixed("regularization", e.problems)

    wp = None
    if rp is not None:
        try:
            wp = WaveParams.for_far_field(ff, nu=rp.nu, **{k: float(v) for k, v in sec["wave"].items()})
        except ValueError as e:
            problems += _prefixed("wave", getattr(e, "problems", None) or [str(e)])

    pert_cfg = sec["perturbation"]
    if pert_cfg.get("path") is not None and base_dir is not None:
        pert_cfg["path"] = str(Path(base_dir, pert_cfg["path"]))
    pert = Perturbation(**pert_cfg)
    problems += pert.problems()

    obs = sec["observe"]
    times = ()
    t_end = solver.t_end if solver is not None else math.inf
    if "times" in obs and "count" in obs:
        problems.append("observe: give either times or count, not both")
    elif "count" in obs:
        n = int(obs["count"])
        if n < 2:
            problems.append(f"observe.count: must be >= 2, got {n}")
        elif solver is not None:
            times = tuple(float(t) for t in np.linspace(0.0, t_end, n))
    else:
        times = tuple(float(t) for t in obs.get("times", (0.0, t_end)))
        if list(times) != sorted(times) or len(set(times)) != len(times):
            problems.append("observe.times: must be strictly ascending")
        if times and (times[0] < 0 or times[-1] > t_end):
            problems.append(f"observe.times: must lie within [0, t_end={t_end}]")

    dcfg = sec["diagnostics"]
    diag = DiagnosticsParams(
        s=None if dcfg.get("s") is None else float(dcfg["s"]),
        l=dcfg.get("l", 1),
        sigma=tuple(float(v) for v in dcfg.get("sigma", (0.25,))),
        p=tuple(float(v) for v in dcfg.get("p", (math.inf,))),
        cubic_moment=bool(dcfg.get("cubic_moment", False)),
    )
    if ff is not None:
        try:
            _check_fparams(default_s(ff) if diag.s is None else diag.s, diag.l, ff)
        except ConfigurationError as e:
            problems.append(f"diagnostics.s/l: {e}")
        bad = [s for s in diag.sigma if not 0 < s <= ff.rho_plus]
        if bad:
            problems.append(f"diagnostics.sigma: values {bad} outside (0, rho_plus]")
    bad = [p for p in diag.p if not p > 2]
    if bad:
        problems.append(f"diagnostics.p: values {bad} must exceed 2")

    if problems:
        raise ConfigurationError("; ".join(problems), problems)
    return Scenario(name=str(cfg.get("name", "scenario")), ff=ff, wp=wp, rp=rp, solver=solver,
                    perturbation=pert, observe_times=times, diagnostics=diag)


def load_scenario(path, decouple_nu: bool = False, overrides: dict | None = None) -> Scenario:
    """Read and validate a TOML scenario; ``overrides`` maps dotted paths to values."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(f"{path}: parse error: {e}", [f"parse: {e}"]) from e
    except OSError as e:
        raise ConfigurationError(f"{path}: {e.strerror}", [f"file: {e}"]) from e
    cfg.setdefault("name", path.stem)
    for key, val in (overrides or {}).items():
        _set(cfg, key, val)
    return scenario_from_dict(cfg, decouple_nu=decouple_nu, base_dir=path.parent)


def scenario_to_dict(sc: Scenario) -> dict:
    """Config-form dict that round-trips through :func:`scenario_from_dict`.

    ``nu`` is only written when decoupled so that sweeping ``epsilon``
    keeps the coupling.
    """
    reg = {"epsilon": sc.rp.epsilon}
    if sc.rp.decoupled:
        reg.update(nu=sc.rp.nu, decouple_nu=True)
    d = {
        "name": sc.name,
        "far_field": asdict(sc.ff),
        "wave": {"eta": sc.wp.eta, "q": sc.wp.q},
        "regularization": reg,
        "solver": asdict(sc.solver),
        "perturbation": {k: v for k, v in asdict(sc.perturbation).items() if v is not None},
        "observe": {"times": list(sc.observe_times)},
        "diagnostics": {k: (list(v) if isinstance(v, tuple) else v)
                        for k, v in asdict(sc.diagnostics).items() if v is not None},
    }
    return d


def derived_parameters(sc: Scenario) -> dict:
    return {
        "nu": sc.rp.nu,
        "floor": sc.rp.floor,
        "theta": sc.rp.theta,
        "w_minus": sc.wp.w_minus,
        "w_plus": sc.wp.w_plus,
        "K_q": sc.wp.K_q,
        "dx": sc.solver.dx,
        "s": default_s(sc.ff) if sc.diagnostics.s is None else sc.diagnostics.s,
        "epsilon_log_horizon": sc.rp.epsilon * math.log1p(sc.solver.t_end),
    }


def with_override(sc: Scenario, path: str, value) -> Scenario:
    d = copy.deepcopy(scenario_to_dict(sc))
    if _lookup(d, path) is _MISSING:
        raise ConfigurationError(f"unknown parameter {path!r}", [f"{path}: unknown parameter"])
    _set(d, path, value)
    if path == "solver.t_end":
        d["observe"]["times"] = [t for t in d["observe"]["times"] if t <= value]
    return scenario_from_dict(d, decouple_nu=sc.rp.decoupled)


S1_CONFIG = {
    "name": "s1",
    "far_field": {"rho_plus": 1.0, "u_plus": 0.0, "gamma": 2.0, "A": 1.0, "alpha": 1.0, "B": 1.0},
    "wave": {"eta": 0.1, "q": 2.0},
    "regularization": {"epsilon": 1e-3},
    "solver": {"x_left": -60.0, "x_right": 160.0, "n_cells": 4400, "cfl": 0.5, "t_end": 80.0},
    "perturbation": {"kind": "sine-bump", "amplitude": 0.2, "width": 10.0},
    "observe": {"times": [0.0, 1.0, 2.0, 5.0, 10.0, 15.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0]},
    "diagnostics": {"l": 1, "sigma": [0.25], "p": [4.0, math.inf]},
}
S2_CONFIG = {
    **S1_CONFIG,
    "name": "s2",
    "solver": {**S1_CONFIG["solver"], "x_left": -300.0, "n_cells": 4600},
    "perturbation": {"kind": "none"},
}
BUILTIN = {"s1": S1_CONFIG, "s2": S2_CONFIG}


def builtin_scenario(name: str) -> Scenario:
    return scenario_from_dict(copy.deepcopy(BUILTIN[name]))


# -- running ------------------------------------------------------------------

def initial_state(sc: Scenario) -> SimState:
    ff, wp = sc.ff, sc.wp
    pert = sc.perturbation

    def fields0(x):
        ev = smooth_wave(0.0, x, ff, wp)
        rho, u = ev.rho_bar, ev.u_bar
        if pert.kind == "sine-bump":
            rho = rho * (1.0 + pert.amplitude * np.sin(x) * np.exp(-((x / pert.width) ** 2)))
        elif pert.kind == "custom":
            tab = np.loadtxt(pert.path, delimiter=",", skiprows=1, ndmin=2)
            inside = (x >= tab[0, 0]) & (x <= tab[-1, 0])
            rho = np.where(inside, np.interp(x, tab[:, 0], tab[:, 1]), rho)
            u = np.where(inside, np.interp(x, tab[:, 0], tab[:, 2]), u)
        return rho, rho * u

    return regularize_initial(lambda x: fields0(x)[0], lambda x: fields0(x)[1], sc.rp, ff, wp, sc.solver)


def _fmt(v) -> str:
    return repr(float(v))


def write_snapshot(path, state: SimState, header: dict):
    """CSV snapshot: a ``# {json}`` header line, then ``rho,m`` rows in round-trip precision."""
    head = dict(header, t=state.t, dx=state.dx, x0=state.x0, n=len(state.rho))
    tmp = Path(str(path) + ".tmp")
    with open(tmp, "w", newline="") as fh:
        fh.write("# " + json.dumps(head, sort_keys=True) + "\n")
        fh.write("rho,m\n")
        fh.writelines(f"{_fmt(r)},{_fmt(m)}\n" for r, m in zip(state.rho, state.m))
    os.replace(tmp, path)


def read_snapshot(path):
    """Inverse of :func:`write_snapshot`; returns ``(state, header)``."""
    with open(path) as fh:
        first = fh.readline()
        if not first.startswith("# "):
            raise ConfigurationError(f"{path}: missing JSON header line")
        head = json.loads(first[2:])
        data = np.loadtxt(fh, delimiter=",", skiprows=1, ndmin=2)
    state = SimState(t=head["t"], dx=head["dx"], x0=head["x0"], rho=data[:, 0], m=data[:, 1])
    return state, head


class _Interrupted(Exception):
    pass


def _distance_columns(sc: Scenario):
    tag = lambda p: "inf" if math.isinf(p) else repr(p)  # noqa: E731
    return ["t"] + [f"{tgt}_L{tag(p)}" for p in sc.diagnostics.p for tgt in ("exact", "smooth")]


def _truncate_csv(path, t_max):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    keep = [rows[0]] + [r for r in rows[1:] if float(r[0]) <= t_max]
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(keep)


def run_scenario(sc: Scenario, out_dir, resume: bool = False, stop_after_steps: int | None = None,
                 log=None) -> int:
    """Run ``sc`` writing functionals, distances, snapshots, region report and manifest.

    A checkpoint (same format as snapshots, plus accumulators) is rewritten
    at every observation and on interruption or solver abort. With
    ``resume=True`` the run continues from ``out_dir/checkpoint.csv``.
    ``stop_after_steps`` simulates an interruption. Returns an exit status.
    """
    out = Path(out_dir)
    (out / "snapshots").mkdir(parents=True, exist_ok=True)
    cfg = scenario_to_dict(sc)
    diag = sc.diagnostics
    fcsv, dcsv = out / "functionals.csv", out / "distances.csv"
    cols = FunctionalReport.columns() + (["cubic_moment"] if diag.cubic_moment else [])
    header = {"config": cfg, "version": __version__}

    if resume:
        state, head = read_snapshot(out / "checkpoint.csv")
        if head.get("config") != json.loads(json.dumps(cfg)):
            raise ConfigurationError("checkpoint was written by a different configuration")
        acc = Accumulators.from_dict(head["accumulators"])
        n_obs = head["n_obs"]
        t_done = acc.t if acc.t is not None else -math.inf
        for p in (fcsv, dcsv):
            _truncate_csv(p, t_done)
        trajectory = []
        for k in range(n_obs):
            snap, _ = read_snapshot(out / "snapshots" / f"snap_{k:04d}.csv")
            trajectory.append((snap.t, snap.x, snap.rho))
        resume_state = state
    else:
        state = initial_state(sc)
        acc = Accumulators()
        n_obs = 0
        trajectory = []
        for p, c in ((fcsv, cols), (dcsv, _distance_columns(sc))):
            with open(p, "w", newline="") as fh:
                csv.writer(fh, lineterminator="\n").writerow(c)
        resume_state = None

    progress = {"n_obs": n_obs, "latest": state, "steps": 0}

    def observe(st: SimState):
        rep = functional_report(st, sc.rp, sc.ff, sc.wp, accumulators=acc, s=diag.s, l=diag.l,
                                extras=diag.cubic_moment)
        row = rep[0].row() + [rep[1]["cubic_moment"]] if diag.cubic_moment else rep.row()
        dist = [st.t]
        for p in diag.p:
            dist.append(sup_and_lp_distance(st, "exact", p, sc.ff) if st.t > 0 else math.nan)
            dist.append(sup_and_lp_distance(st, "smooth", p, sc.ff, sc.wp))
        for path, vals in ((fcsv, row), (dcsv, dist)):
            with open(path, "a", newline="") as fh:
                fh.write(",".join(_fmt(v) for v in vals) + "\n")
        k = progress["n_obs"]
        write_snapshot(out / "snapshots" / f"snap_{k:04d}.csv", st, header)
        progress["n_obs"] = k + 1
        trajectory.append((st.t, st.x, st.rho.copy()))
        _checkpoint(st)
        if log:
            log(f"t={st.t:g} sup_dist={rep_sup(rep):.4g}")

    def rep_sup(rep):
        return (rep[0] if isinstance(rep, tuple) else rep).sup_dist

    def _checkpoint(st):
        write_snapshot(out / "checkpoint.csv", st,
                       dict(header, accumulators=acc.to_dict(), n_obs=progress["n_obs"]))

    def hook(st, info):
        progress["latest"] = st
        progress["steps"] += 1
        if stop_after_steps is not None and progress["steps"] >= stop_after_steps:
            raise _Interrupted

    status, error, result = "completed", None, None
    try:
        result = run(sc.solver, sc.rp, sc.ff, sc.wp, observers=[observe], observe_times=sc.observe_times,
                     state=resume_state if resume else state, step_hook=hook, resume=resume,
                     boundary=make_boundary(sc.solver, sc.rp, sc.ff, sc.wp))
    except (_Interrupted, KeyboardInterrupt):
        status = "interrupted"
        _checkpoint(progress["latest"])
    except SolverAbort as e:
        status, error = "aborted", f"{type(e).__name__}: {e}"
        _checkpoint(progress["latest"])

    regions = [asdict(region_check(trajectory, sc.ff, s)) for s in diag.sigma]
    vac = vacuum_persistence(trajectory, sc.ff, sc.rp.nu)
    with open(out / "region.json", "w") as fh:
        json.dump({"region_checks": regions, "vacuum_persistence": asdict(vac)}, fh, indent=2, sort_keys=True)
        fh.write("\n")

    manifest = {
        "name": sc.name,
        "version": __version__,
        "status": status,
        "error": error,
        "conforming": not sc.rp.decoupled,
        "config": cfg,
        "derived": derived_parameters(sc),
        "warnings": ([] if result is None else result.warnings)
        or [w for w in [horizon_warning(sc.rp.epsilon, sc.solver.t_end)] if w],
        "observations": progress["n_obs"],
        "resumed": resume,
    }
    if result is not None:
        manifest.update(n_steps=result.n_steps, max_mass_defect=result.max_mass_defect,
                        clamped_mass=result.clamped_mass, n_clamped=result.n_clamped, max_rho=result.max_rho)
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK if status == "completed" else EXIT_ERROR


def read_functionals(out_dir) -> dict:
    """Columns of ``functionals.csv`` as float arrays."""
    with open(Path(out_dir) / "functionals.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    return {name: np.array([float(r[i]) for r in rows[1:]]) for i, name in enumerate(rows[0])}


# -- sweeps and refinement ----------------------------------------------------

def _sweep_member(args):
    sc, out = args
    return run_scenario(sc, out)


def sweep_members(spec: SweepSpec) -> list[tuple]:
    return [(v, with_override(spec.base, spec.axis, v)) for v in spec.values]


def run_sweep(spec: SweepSpec, out_dir, workers: int | None = None) -> dict:
    """One scenario per worker process; returns ``{value: exit status}``."""
    members = sweep_members(spec)
    jobs = [(sc, Path(out_dir) / f"{spec.axis}={v}") for v, sc in members]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        codes = list(pool.map(_sweep_member, jobs))
    return {v: c for (v, _), c in zip(members, codes)}


@dataclass
class RefineTable:
    cells: list
    err_rho: list
    err_m: list
    order_rho: list = field(default_factory=list)
    order_m: list = field(default_factory=list)

    def __post_init__(self):
        self.order_rho = _orders(self.err_rho)
        self.order_m = _orders(self.err_m)

    def rows(self):
        out = []
        for i, n in enumerate(self.cells[: len(self.err_rho)]):
            o_r = self.order_rho[i - 1] if i > 0 else math.nan
            o_m = self.order_m[i - 1] if i > 0 else math.nan
            out.append((n, self.err_rho[i], o_r, self.err_m[i], o_m))
        return out


def _orders(errs):
    return [math.log2(a / b) for a, b in zip(errs[:-1], errs[1:])]


def refine_study(sc: Scenario, levels: int, manufactured: bool = True, base_cells: int | None = None,
                 x_range=(-3.0, 3.0), t_end: float = 0.5) -> RefineTable:
    """L1 errors at ``n, 2n, 4n, ...`` cells and observed orders.

    With ``manufactured=True`` errors are against the manufactured solution
    built from ``sc``'s far field and regularization; otherwise ``sc`` itself
    is run and errors are differences between consecutive levels (the finer
    level averaged in pairs onto the coarser grid).
    """
    if levels < 3:
        raise ConfigurationError(f"refine_study needs levels >= 3, got {levels}", ["refine.levels: must be >= 3"])
    cells, err_r, err_m = [], [], []
    if manufactured:
        n0 = base_cells or 100
        ms = build_manufactured(sc.ff, sc.rp)
        for k in range(levels):
            n = n0 * 2**k
            cfg = replace(sc.solver, x_left=x_range[0], x_right=x_range[1], n_cells=n, t_end=t_end)
            x = cfg.centers()
            st = SimState(0.0, cfg.dx, cfg.x_left, ms.rho(0.0, x), ms.m(0.0, x))
            res = run(cfg, sc.rp, sc.ff, sc.wp, state=st, boundary=ms.boundary, source=ms.source)
            cells.append(n)
            err_r.append(float(np.sum(np.abs(res.state.rho - ms.rho(t_end, x))) * cfg.dx))
            err_m.append(float(np.sum(np.abs(res.state.m - ms.m(t_end, x))) * cfg.dx))
        return RefineTable(cells, err_r, err_m)

    n0 = base_cells or sc.solver.n_cells
    states = []
    for k in range(levels):
        member = replace(sc, solver=replace(sc.solver, n_cells=n0 * 2**k))
        res = run(member.solver, sc.rp, sc.ff, sc.wp, state=initial_state(member))
        cells.append(member.solver.n_cells)
        states.append(res.state)
    for coarse, fine in zip(states[:-1], states[1:]):
        err_r.append(float(np.sum(np.abs(coarse.rho - fine.rho.reshape(-1, 2).mean(1))) * coarse.dx))
        err_m.append(float(np.sum(np.abs(coarse.m - fine.m.reshape(-1, 2).mean(1))) * coarse.dx))
    return RefineTable(cells, err_r, err_m)


def eps_sweep(sc: Scenario, eps_values=(0.1, 0.01, 0.001), t: float | None = None) -> list[tuple]:
    """Smooth-wave initial data, one run per epsilon (with coupled nu).

    Returns ``(epsilon, nu, sup_dist)`` rows with ``sup_dist`` measured
    against that run's approximate wave at time ``t``.
    """
    t = sc.solver.t_end if t is None else t
    rows = []
    for eps in eps_values:
        member = with_override(with_override(sc, "regularization.epsilon", eps), "solver.t_end", t)
        member = replace(member, perturbation=Perturbation())
        res = run(member.solver, member.rp, member.ff, member.wp, state=initial_state(member))
        rows.append((eps, member.rp.nu, sup_and_lp_distance(res.state, "smooth", math.inf, member.ff, member.wp)))
    return rows


WAVE_COLUMNS = ("t", "x", "rho_bar", "u_bar", "rho_bar_x", "u_bar_x", "u_bar_xx")


def wave_table(sc: Scenario, path, times=None, x=None):
    """Dump the approximate wave and its derivatives on ``x`` (default: cell centres)."""
    times = sc.observe_times if times is None else times
    x = sc.solver.centers() if x is None else np.asarray(x, dtype=float)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(WAVE_COLUMNS) + "\n")
        for t in times:
            ev = smooth_wave(t, x, sc.ff, sc.wp)
            cols = np.broadcast_arrays(float(t), x, ev.rho_bar, ev.u_bar, ev.rho_bar_x, ev.u_bar_x, ev.u_bar_xx)
            for vals in zip(*cols):
                fh.write(",".join(_fmt(v) for v in vals) + "\n")
