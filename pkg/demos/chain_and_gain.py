"""Subspace chain, observability verdicts and gains for a random pair.

For an observable single-output pair the chain shrinks by one dimension per
step, the PBH test and the chain agree, and the two gain formulas land on the
same matrix up to round-off.
"""

import numpy as np

from deadbeat import (
    LinearSystem,
    ackermann_gain,
    deadbeat_gain,
    deadbeat_observable_via_sets,
    pbh_deadbeat_observable,
    subspace_chain,
)
from deadbeat.bench import random_observable_pair

rng = np.random.default_rng(2024)
sys = random_observable_pair(5, rng)

print("dims of S_0 .. S_n:", subspace_chain(sys).dims)
print("PBH test            :", pbh_deadbeat_observable(sys))
print("S_n = {0}           :", deadbeat_observable_via_sets(sys))

g1, g2 = deadbeat_gain(sys), ackermann_gain(sys)
print("\nset iteration L :", np.array2string(g1.L.ravel(), precision=6))
print("Ackermann L     :", np.array2string(g2.L.ravel(), precision=6))
print(f"||(A - LC)^n||_F : {g1.residual:.2e} vs {g2.residual:.2e}")

M = sys.A - g1.L @ sys.C
print("eigenvalue moduli of A - LC:", 
      ", ".join(f"{v:.1e}" for v in np.abs(np.linalg.eigvals(M))))
print("(small but not tiny: a perturbed nilpotent matrix has eigenvalues near eps^(1/n))")

# an unobservable pair: the identity hides its second coordinate forever
blind = LinearSystem(np.eye(2), [[1.0, 0.0]])
print("\nidentity with C = [1 0]: dims", subspace_chain(blind).dims,
      "observable:", pbh_deadbeat_observable(blind))
