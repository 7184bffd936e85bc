"""The two third-order nonlinear examples, simulated in cascade.

Both observers reach the true state within three steps from any start in
their domain.
"""

import numpy as np

from deadbeat.nonlinear import HOMOGENEOUS, WITH_INPUT, run_observer


def show(title, trace):
    print(title)
    for k, (x, xh, e) in enumerate(zip(trace.plant_states, trace.observer_states, trace.errors)):
        print(f"  k={k}  x={np.round(x, 5)}  xhat={np.round(xh, 5)}  err={e:.2e}")
    print(f"  deadbeat horizon: {trace.deadbeat_horizon}\n")


show("homogeneous, x0 = (1,1,1), xhat0 = 0",
     run_observer(HOMOGENEOUS, [1, 1, 1], [0, 0, 0], steps=4))
show("with input u = 4, x0 = (1,2,1), xhat0 = (1,1,1)",
     run_observer(WITH_INPUT, [1, 2, 1], [1, 1, 1], inputs=[4.0] * 4))

rng = np.random.default_rng(7)
x0, xhat0 = rng.standard_normal(3) * 3, rng.standard_normal(3) * 3
show("homogeneous, random start", run_observer(HOMOGENEOUS, x0, xhat0, steps=5))
