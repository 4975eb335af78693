"""
Calibrating the detection threshold
===================================

Without an attack the scaled statistic behaves like the squared maximum of a
standardized Brownian bridge. Its upper quantile is the threshold.
"""
import numpy as np

from eclipse_detect import simulate_bridge_quantile
from eclipse_detect.detector import sample_standardized_bridge

###############################################################################
# A handful of paths: each coordinate has mean 0 and variance 1.
t, z = sample_standardized_bridge(1000, 0.1, 5000, np.random.default_rng(0))
print("grid points:", t.size)
print("mean range:", z.mean(axis=0).min().round(3), z.mean(axis=0).max().round(3))
print("variance range:", z.var(axis=0).min().round(3), z.var(axis=0).max().round(3))

###############################################################################
# The threshold depends on the level and on how much of each end is trimmed.
for delta in (0.05, 0.1, 0.2):
    row = [simulate_bridge_quantile(alpha, delta, 1000, 10_000, seed=0).quantile for alpha in (0.01, 0.05, 0.1)]
    print(f"delta={delta:.2f}  q99={row[0]:.2f}  q95={row[1]:.2f}  q90={row[2]:.2f}")
