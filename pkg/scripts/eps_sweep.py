"""Inviscid-limit check: sup|rho - rho_bar| at fixed t for epsilon in {0.1, 0.01, 0.001}."""
import argparse

from vacwave.harness import builtin_scenario, eps_sweep, with_override

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--t", type=float, default=10.0)
p.add_argument("--cells", type=int, default=1600)
args = p.parse_args()

sc = builtin_scenario("s1")
for path, val in (("solver.x_right", 100.0), ("solver.n_cells", args.cells)):
    sc = with_override(sc, path, val)
for eps, nu, d in eps_sweep(sc, t=args.t):
    print(f"epsilon={eps:<6g} nu={nu:.4g} sup_dist={d:.5g}")
