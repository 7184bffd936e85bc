"""Deadbeat observers built from iterated intersections of state sets."""

from .subspaces import (
    AffineSet,
    InvalidInputError,
    Subspace,
    affine_intersect,
    column_space,
    image,
    intersect,
    null_space,
    orth_complement,
    preimage,
    subspace_equal,
)
from .linear import (
    DegeneracyError,
    LinearSystem,
    NotObservableError,
    ObserverGain,
    ObserverTrace,
    SubspaceChain,
    ackermann_gain,
    class_plus,
    deadbeat_gain,
    deadbeat_observable_via_sets,
    equivalence_class,
    geometric_observer_step,
    luenberger_step,
    nilpotency_residual,
    pbh_deadbeat_observable,
    pi_index,
    simulate_cascade,
    subspace_chain,
)
from .nonlinear import HOMOGENEOUS, WITH_INPUT, ObservedSystem, DomainError, run_observer

__version__ = "0.1.0"
