"""
Small sample changes, large position changes
============================================

With the kernel chi_[0, 2), a train of unit boxes and a slightly stretched copy
have nearly identical samples, yet the n-th edge drifts by about n * eps.
"""
import numpy as np

from bilevel import unit_box_example

eps = 0.01
ex1 = unit_box_example(1, eps, count=50)
print("example 1: largest sample gap for n >= 2:", ex1.sup_from_2)
print("           edge drift at 1, 10, 20:", ex1.transition_dev[[0, 9, 19]])

ex2 = unit_box_example(2, eps, count=50)
print("example 2: samples differ only at n =", ex2.differing_indices.tolist(),
      "by", np.max(ex2.sample_dev))
print("           every edge moved by", ex2.transition_dev[:4], "...")
