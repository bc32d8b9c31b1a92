"""
Moving every edge a little
==========================

If every transition moves by at most delta, no sample moves by more than
(floor(M R T) + 2) * ||h||_inf * delta.
"""
import numpy as np

from bilevel import (PerturbationSpec, cumulative, h0_kernel, max_local_rate, perturb,
                     stability_bound, sup_sample_deviation, x0_signal)

x = x0_signal()
h = h0_kernel()
H = cumulative(h)
R = max_local_rate(x)
rng = np.random.default_rng(1)

for delta in (0.001, 0.01, 0.1):
    moved = perturb(x, PerturbationSpec(rng.uniform(-delta, delta, x.transitions.size)))
    dev = sup_sample_deviation(x, moved, H, 1.0, 16)
    print(f"delta={delta:<6} sample deviation {dev:.5f} <= bound {stability_bound(h, R, 1.0, delta):.5f}")
