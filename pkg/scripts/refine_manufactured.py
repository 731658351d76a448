"""Manufactured-solution refinement table for both time integrators."""
import argparse

from vacwave.harness import builtin_scenario, refine_study, with_override

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--levels", type=int, default=4)
p.add_argument("--cells", type=int, default=50)
args = p.parse_args()

for integrator in ("euler", "ssprk2"):
    sc = with_override(builtin_scenario("s1"), "solver.integrator", integrator)
    table = refine_study(sc, args.levels, base_cells=args.cells)
    print(f"{integrator}:")
    print(f"{'cells':>6} {'L1 rho':>11} {'order':>6} {'L1 m':>11} {'order':>6}")
    for n, er, orr, em, om in table.rows():
        print(f"{n:6d} {er:11.4e} {orr:6.3f} {em:11.4e} {om:6.3f}")
