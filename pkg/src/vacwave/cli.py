"""Command line entry point: ``vacwave {run,sweep,refine,accept,wave-dump}``.

Exit codes: 0 ok, 1 an acceptance criterion failed, 2 configuration or
runtime error.
"""
from __future__ import annotations

import argparse
import copy
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, SolverAbort
from .harness import (
    BUILTIN,
    EXIT_ERROR,
    EXIT_OK,
    SweepSpec,
    eps_sweep,
    load_scenario,
    refine_study,
    run_scenario,
    run_sweep,
    scenario_from_dict,
    wave_table,
)


def _scenario(args):
    overrides = {}
    if getattr(args, "observe", None):
        overrides["observe"] = {"count": args.observe}
    if args.config is None:
        cfg = copy.deepcopy(BUILTIN["s1"])
        cfg.update(overrides)
        return scenario_from_dict(cfg, decouple_nu=args.decouple_nu)
    return load_scenario(args.config, decouple_nu=args.decouple_nu, overrides=overrides)


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def cmd_run(args):
    sc = _scenario(args)
    out = Path(args.out or f"runs/{sc.name}")
    code = run_scenario(sc, out, resume=args.resume, log=print if args.verbose else None)
    print(f"{sc.name}: {'ok' if code == EXIT_OK else 'failed'} -> {out}")
    return code


def cmd_sweep(args):
    sc = _scenario(args)
    spec = SweepSpec(sc, args.axis, tuple(_parse_value(v) for v in args.values))
    codes = run_sweep(spec, Path(args.out or f"runs/{sc.name}-sweep"), workers=args.workers)
    for v, c in codes.items():
        print(f"{spec.axis}={v}: exit {c}")
    return EXIT_OK if all(c == EXIT_OK for c in codes.values()) else EXIT_ERROR


def cmd_refine(args):
    sc = _scenario(args)
    if args.eps_sweep:
        print("epsilon,nu,sup_dist")
        for eps, nu, d in eps_sweep(sc, t=args.t):
            print(f"{eps!r},{nu!r},{d!r}")
        return EXIT_OK
    table = refine_study(sc, args.levels, manufactured=not args.self_convergence, base_cells=args.cells)
    print("cells,l1_rho,order_rho,l1_m,order_m")
    for row in table.rows():
        print(",".join(repr(float(v)) for v in row))
    return EXIT_OK


def cmd_accept(args):
    from .acceptance import CRITERIA, acceptance

    names = args.only.split(",") if args.only else None
    if names and any(n not in CRITERIA for n in names):
        raise ConfigurationError(f"unknown criteria in {args.only!r}; choose from {list(CRITERIA)}")
    _, code = acceptance(Path(args.out or "runs/acceptance"), criteria=names)
    return code


def cmd_wave_dump(args):
    sc = _scenario(args)
    times = [float(t) for t in args.times.split(",")] if args.times else None
    x = np.linspace(*args.x_range, args.points) if args.x_range else None
    out = Path(args.out or f"{sc.name}-wave.csv")
    wave_table(sc, out, times=times, x=x)
    print(f"wrote {out}")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="vacwave", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp, observe=True):
        sp.add_argument("--config", type=Path, help="scenario TOML (default: built-in S1)")
        sp.add_argument("--out", help="output directory or file")
        sp.add_argument("--decouple-nu", action="store_true", help="allow nu != epsilon^(2/3) (expert)")
        if observe:
            sp.add_argument("--observe", type=int, metavar="N", help="N evenly spaced observation times")

    sp = sub.add_parser("run", help="run one scenario")
    common(sp)
    sp.add_argument("--resume", action="store_true", help="continue from OUT/checkpoint.csv")
    sp.add_argument("-v", "--verbose", action="store_true")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("sweep", help="run a scenario over one parameter axis")
    common(sp)
    sp.add_argument("axis", help="dotted parameter path, e.g. regularization.epsilon")
    sp.add_argument("values", nargs="+")
    sp.add_argument("--workers", type=int)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("refine", help="refinement study (manufactured solution by default)")
    common(sp, observe=False)
    sp.add_argument("--levels", type=int, default=3)
    sp.add_argument("--cells", type=int, help="coarsest cell count")
    sp.add_argument("--self-convergence", action="store_true", help="difference consecutive levels of the scenario")
    sp.add_argument("--eps-sweep", action="store_true", help="sup_dist for epsilon in {0.1, 0.01, 0.001}")
    sp.add_argument("--t", type=float, help="time for --eps-sweep (default t_end)")
    sp.set_defaults(func=cmd_refine)

    sp = sub.add_parser("accept", help="run the acceptance criteria")
    sp.add_argument("--out")
    sp.add_argument("--only", help="comma-separated criteria, e.g. A1,A2")
    sp.set_defaults(func=cmd_accept)

    sp = sub.add_parser("wave-dump", help="tabulate the approximate wave and its derivatives")
    common(sp, observe=False)
    sp.add_argument("--times", help="comma-separated times (default: observation times)")
    sp.add_argument("--x-range", type=float, nargs=2, metavar=("XMIN", "XMAX"))
    sp.add_argument("--points", type=int, default=1001)
    sp.set_defaults(func=cmd_wave_dump)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as e:
        for line in e.problems or [str(e)]:
            print(f"config error: {line}", file=sys.stderr)
        return EXIT_ERROR
    except SolverAbort as e:
        print(f"solver abort: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
