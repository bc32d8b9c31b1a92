"""
Recovery from an irregular sampling grid
========================================

The sample times need not be uniform. As long as no gap is longer than one
period, the same induction recovers every edge.
"""
import numpy as np

from bilevel import cumulative, random_pl_kernel, random_signal, recover_nonuniform, sample_series

rng = np.random.default_rng(3)
x = random_signal(3, box_count=6, gap_range=(1.0, 2.0))
h = random_pl_kernel(3)  # positive on (0, T), two periods of support
H = cumulative(h)

gaps = rng.uniform(0.3, 1.0, size=40)
times = np.cumsum(gaps)
times = times[times < x.transitions[-1] + h.support_end + 1]
print("largest gap:", gaps[: times.size].max())

result = recover_nonuniform(sample_series(x, H, times), H)
print("true:     ", np.round(x.transitions, 6))
print("recovered:", np.round(result.transitions, 6))
print("max error:", np.max(np.abs(result.transitions - x.transitions)))
