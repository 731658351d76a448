"""Run a scenario (default S1) and print the energy / distance trajectory."""
import argparse
import time

from vacwave.harness import builtin_scenario, load_scenario, read_functionals, run_scenario

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--config", help="scenario TOML (default: built-in S1)")
p.add_argument("--out", default="runs/s1")
args = p.parse_args()

sc = load_scenario(args.config) if args.config else builtin_scenario("s1")
t0 = time.perf_counter()
code = run_scenario(sc, args.out)
print(f"{sc.name}: exit {code} in {time.perf_counter() - t0:.1f}s -> {args.out}")
f = read_functionals(args.out)
energy = f["E_kin"] + f["E_grad"] + f["E_ent"]
print(f"{'t':>6} {'E_kin+E_grad+E_ent':>20} {'sup_dist':>12} {'f_decay':>12} {'D_visc':>12}")
for i, t in enumerate(f["t"]):
    print(f"{t:6.1f} {energy[i]:20.6g} {f['sup_dist'][i]:12.4g} {f['f_decay'][i]:12.4g} {f['D_visc'][i]:12.4g}")
