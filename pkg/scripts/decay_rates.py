"""Log-log decay slopes of ||u_bar_x||_p and the time integral of ||u_bar_xx||_inf."""
import argparse

import numpy as np

from vacwave.approx_wave import WaveParams, decay_rates
from vacwave.exact_wave import FarField

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--eta", type=float, default=0.1)
p.add_argument("--q", type=float, default=2.0)
p.add_argument("--nu", type=float, default=1e-2, help="cut-off density (0 for the vacuum wave)")
p.add_argument("--t-max", type=float, default=1e3)
args = p.parse_args()

ff = FarField()
wp = WaveParams.for_far_field(ff, nu=args.nu or None, eta=args.eta, q=args.q)
times = np.geomspace(10.0, args.t_max, 12)
for pn in (1.0, 2.0, np.inf):
    rep = decay_rates(wp, ff, pn, times, uxx_integral=np.isinf(pn))
    print(f"p={pn}: slope {rep.slope:+.4f}")
print(f"int_0^T ||u_bar_xx||_inf dt = {rep.uxx_linf_time_integral:.4g} (eta^(2/(4q+1)) = {rep.uxx_reference:.4g})")
