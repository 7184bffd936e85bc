"""Two-dimensional rotation measured through its second coordinate.

The estimate is corrected by intersecting two lines: the forward image of the
current class and the level set of the new measurement. For a rotation by
theta that intersection has a closed form, and the resulting gain matches the
one from the iterated-intersection algorithm.
"""

import math

import numpy as np

from deadbeat import LinearSystem, deadbeat_gain, simulate_cascade

theta = 1.0
c, s = math.cos(theta), math.sin(theta)
sys = LinearSystem([[c, -s], [s, c]], [[0.0, 1.0]])

L = deadbeat_gain(sys).L.ravel()
print(f"theta = {theta}")
print(f"gain from set iteration : {L}")
print(f"closed form             : {[math.cos(2 * theta) / s, math.sin(2 * theta) / s]}")

x0, xhat0 = np.array([1.0, 2.0]), np.array([-3.0, 0.5])
trace = simulate_cascade(sys, "geometric", x0, xhat0, 5)
print("\nk  error")
for k, e in enumerate(trace.errors):
    print(f"{k}  {e:.3e}")
print(f"deadbeat horizon: {trace.deadbeat_horizon}")
