"""Where does sup|rho - rho_bar| stop decaying?

Runs the unperturbed (or perturbed) wave for a few choices of viscosity
coefficient B, smoothing eta, resolution and domain, and prints the
distance and its location at the S1 observation times. The distance
settles on a plateau set by viscous smoothing of the wave's algebraic
tail; it only starts to decay once sqrt(B t) exceeds the smoothing
length 1/eta.
"""
import argparse

import numpy as np

from vacwave.approx_wave import smooth_wave
from vacwave.diagnostics import f_decay
from vacwave.harness import builtin_scenario, initial_state, with_override
from vacwave.viscous_solver import run

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--B", type=float, nargs="+", default=[1.0])
p.add_argument("--eta", type=float, nargs="+", default=[0.1])
p.add_argument("--cells", type=int, default=2200)
p.add_argument("--x-left", type=float, default=-60.0)
p.add_argument("--amplitude", type=float, default=0.0)
p.add_argument("--t-end", type=float, default=80.0)
args = p.parse_args()

base = builtin_scenario("s1")
for key, val in (("solver.n_cells", args.cells), ("solver.x_left", args.x_left), ("solver.t_end", args.t_end),
                 ("perturbation.amplitude", args.amplitude)):
    base = with_override(base, key, val)
times = [t for t in (1.0, 10.0, 20.0, 40.0, 80.0) if t <= args.t_end]
for B in args.B:
    for eta in args.eta:
        sc = with_override(with_override(base, "far_field.B", B), "wave.eta", eta)
        rows = []

        def obs(st):
            d = st.rho - smooth_wave(st.t, st.x, sc.ff, sc.wp).rho_bar
            i = int(np.argmax(np.abs(d)))
            rows.append((st.t, abs(d[i]), st.x[i], f_decay(st, sc.wp, sc.ff)))

        run(sc.solver, sc.rp, sc.ff, sc.wp, observers=[obs], observe_times=times, state=initial_state(sc))
        print(f"B={B:g} eta={eta:g} dx={sc.solver.dx:g} amplitude={args.amplitude:g}")
        for t, d, x, f in rows:
            print(f"  t={t:5.1f} sup_dist={d:.4g} at x={x:8.2f} f_decay={f:.4g}")
        by_t = {r[0]: r for r in rows}
        if 10.0 in by_t and args.t_end in by_t:
            print(f"  sup ratio t_end/10 = {by_t[args.t_end][1] / by_t[10.0][1]:.3f}")
