"""
Detecting an eclipse attack in a simulated network
==================================================

We simulate 1000 snapshots of a 100-user network where every user keeps 5
neighbours. From snapshot 600 on, users 98 and 99 always link to user 0.
Only the first four rows of each adjacency matrix are kept.
"""
import numpy as np

from eclipse_detect import detect, generate_sequence
from eclipse_detect.presets import preset_config, preset_scenario

###############################################################################
# Honest and attacked sequences share everything except the attack flag.
honest = generate_sequence(preset_scenario("paper-iv", attack=False, seed=1))
attacked = generate_sequence(preset_scenario("paper-iv", attack=True, tau=600, seed=1))
print(honest.data.shape, attacked.truth)

###############################################################################
# The victim row is the only place the attack shows up.
print("victim column 98 before:", attacked.data[:599, 0, 98].mean())
print("victim column 98 after: ", attacked.data[599:, 0, 98].mean())

###############################################################################
# Project to 100 dimensions, compute the statistic curve and compare its
# maximum with the bridge quantile.
config = preset_config("paper-iv")
for name, seq in [("honest", honest), ("attacked", attacked)]:
    report = detect(seq, config)
    print(f"{name:9s} max T = {report.max_scaled_stat:8.2f}  threshold = {report.threshold:.2f}  "
          f"-> {report.verdict()}")

###############################################################################
# The curve peaks right before the first attacked snapshot.
curve = detect(attacked, config).curve
top = np.argsort(curve.scaled)[-3:][::-1]
print("largest T at n =", curve.n[top], "values", np.round(curve.scaled[top], 1))
