"""Set-based deadbeat observers for two third-order nonlinear plants.

For both plants the deepest forward class around an estimate meets the
measured level set ``h^{-1}(y)`` in exactly one point, which the observer
then pushes through the plant map:

    xhat+ = f([xhat]^+_{p-2} ∩ h^{-1}(y) [, u]),    p = 3.

``homogeneous``: ``f(x) = (x2, cbrt(x3), x1^3 + x2^3)``, ``h(x) = x1`` on R^3.

``with-input``: ``f(x, u) = (x1 x2 x3, x3 / x1, sqrt(x1 x2 u))``,
``h(x) = x1`` on the open positive orthant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .linear import ObserverTrace, deadbeat_horizon

# values below this are treated as having left the positive orthant
POSITIVE_FLOOR = 1e-300


class DomainError(ValueError):
    """A state or input left the domain on which the plant is defined."""


def _vec3(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {x.shape}")
    return x


# ---------------------------------------------------------------------------
# homogeneous example


def homog_f(x) -> np.ndarray:
    x1, x2, x3 = _vec3(x)
    return np.array([x2, np.cbrt(x3), x1**3 + x2**3])


def homog_f_inverse(x) -> np.ndarray:
    x1, x2, x3 = _vec3(x)
    return np.array([np.cbrt(x3 - x1**3), x1, x2**3])


def homog_h(x) -> float:
    return float(_vec3(x)[0])


def homog_class_intersection(xhat, y) -> np.ndarray:
    """The single point of ``[xhat]_1^+ ∩ {x1 = y}``."""
    x1, x2, x3 = _vec3(xhat)
    return np.array([y, x2, x3 - x1**3 + y**3])


def homog_observer_step(xhat, y) -> np.ndarray:
    x1, x2, x3 = _vec3(xhat)
    return np.array([x2, np.cbrt(x3 - x1**3 + y**3), x2**3 + y**3])


def dilation_apply(lam: float, x) -> np.ndarray:
    """``diag(lam, lam, lam^3) x``."""
    x1, x2, x3 = _vec3(x)
    return np.array([lam * x1, lam * x2, lam**3 * x3])


# ---------------------------------------------------------------------------
# example with input


def in_positive_orthant(x) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(np.all(np.isfinite(x)) and np.all(x >= POSITIVE_FLOOR))


def _require_positive(name: str, v) -> None:
    v = np.atleast_1d(np.asarray(v, dtype=float))
    bad = [i for i, vi in enumerate(v) if not (np.isfinite(vi) and vi >= POSITIVE_FLOOR)]
    if bad:
        which = ", ".join(f"{name}[{i}]={float(v[i])!r}" for i in bad) if v.size > 1 else f"{name}={float(v[0])!r}"
        raise DomainError(f"must be strictly positive: {which}")


def input_f(x, u: float) -> np.ndarray:
    x = _vec3(x)
    _require_positive("x", x)
    _require_positive("u", u)
    x1, x2, x3 = x
    return np.array([x1 * x2 * x3, x3 / x1, np.sqrt(x1 * x2 * u)])


def input_f_preimage(x, u: float) -> np.ndarray:
    """The state ``eta`` with ``input_f(eta, u) = x``."""
    x = _vec3(x)
    _require_positive("x", x)
    _require_positive("u", u)
    x1, x2, x3 = x
    return np.array([x1 * u / (x2 * x3**2), x2 * x3**4 / (x1 * u**2), x1 * u / x3**2])


def input_h(x) -> float:
    return float(_vec3(x)[0])


def input_class_intersection(xhat, y) -> np.ndarray:
    """The single point of ``[xhat]_1^+ ∩ {x1 = y}``; independent of the input."""
    xhat = _vec3(xhat)
    _require_positive("xhat", xhat)
    _require_positive("y", y)
    x1, x2, x3 = xhat
    return np.array([y, x1 * x2 / y, x3 * y / x1])


def input_observer_step(xhat, y: float, u: float) -> np.ndarray:
    xhat = _vec3(xhat)
    _require_positive("xhat", xhat)
    _require_positive("y", y)
    _require_positive("u", u)
    x1, x2, x3 = xhat
    return np.array([x2 * x3 * y, x3 / x1, np.sqrt(x1 * x2 * u)])


# ---------------------------------------------------------------------------
# generic description and runner


@dataclass(frozen=True)
class ObservedSystem:
    """A plant together with the closed-form class intersection its observer needs.

    ``step`` takes ``(x, u)`` when ``has_input`` and ``(x,)`` otherwise.
    ``class_intersection(xhat, y)`` returns the point of
    ``[xhat]^+_{p-2} ∩ h^{-1}(y)``.
    """

    name: str
    state_dim: int
    has_input: bool
    p: int
    step: Callable
    output: Callable
    class_intersection: Callable
    domain_check: Callable

    def observer_step(self, xhat, y, u=None) -> np.ndarray:
        point = self.class_intersection(xhat, y)
        if self.has_input:
            return self.step(point, u)
        return self.step(point)


HOMOGENEOUS = ObservedSystem(
    name="homogeneous",
    state_dim=3,
    has_input=False,
    p=3,
    step=homog_f,
    output=homog_h,
    class_intersection=homog_class_intersection,
    domain_check=lambda x: bool(np.all(np.isfinite(x))),
)

WITH_INPUT = ObservedSystem(
    name="with-input",
    state_dim=3,
    has_input=True,
    p=3,
    step=input_f,
    output=input_h,
    class_intersection=input_class_intersection,
    domain_check=in_positive_orthant,
)

EXAMPLES = {s.name: s for s in (HOMOGENEOUS, WITH_INPUT)}


def get_example(name: str) -> ObservedSystem:
    try:
        return EXAMPLES[name]
    except KeyError:
        raise ValueError(f"unknown example {name!r}; choose from {sorted(EXAMPLES)}") from None


def run_observer(system: ObservedSystem, x0, xhat0, inputs: Optional[Sequence[float]] = None,
                 steps: Optional[int] = None, tol: float = 1e-8) -> ObserverTrace:
    """Simulate plant and observer in cascade.

    ``inputs[k]`` is applied at step ``k``; with ``steps`` omitted the run
    length is ``len(inputs)``. The trace's horizon uses a relative error
    tolerance ``tol``.
    """
    x = np.asarray(x0, dtype=float).reshape(-1)
    xhat = np.asarray(xhat0, dtype=float).reshape(-1)
    if system.has_input:
        if inputs is None:
            raise ValueError(f"example {system.name!r} needs an input sequence")
        inputs = np.asarray(inputs, dtype=float).reshape(-1)
        if steps is None:
            steps = len(inputs)
        if len(inputs) < steps:
            raise ValueError(f"{len(inputs)} inputs given for {steps} steps")
        inputs = inputs[:steps]
    elif steps is None:
        raise ValueError("steps is required for systems without input")
    if steps < 0:
        raise ValueError("steps must be nonnegative")

    for label, v in (("x0", x), ("xhat0", xhat)):
        if v.shape != (system.state_dim,):
            raise ValueError(f"{label} must have {system.state_dim} entries")
        if not system.domain_check(v):
            # the packaged domains are products of per-component conditions
            bad = [i for i, vi in enumerate(v) if not system.domain_check(np.full(v.shape, vi))]
            which = ", ".join(f"{label}[{i}]={float(v[i])!r}" for i in bad)
            raise DomainError(f"outside the domain of {system.name!r}: {which}")

    xs, xhs = [x], [xhat]
    for k in range(steps):
        u = inputs[k] if system.has_input else None
        y = system.output(x)
        try:
            xhat = system.observer_step(xhat, y, u)
            x = system.step(x, u) if system.has_input else system.step(x)
        except DomainError as exc:
            raise DomainError(f"step {k}: {exc}") from exc
        if not (system.domain_check(x) and system.domain_check(xhat)):
            raise DomainError(f"step {k}: trajectory left the domain of {system.name!r}")
        xs.append(x)
        xhs.append(xhat)
    xs, xhs = np.array(xs), np.array(xhs)
    errors = np.linalg.norm(xhs - xs, axis=1)
    return ObserverTrace(xs, xhs, errors, deadbeat_horizon(xs, errors, tol),
                         inputs if system.has_input else None)
