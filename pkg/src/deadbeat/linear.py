"""Deadbeat observability and deadbeat gains for ``x+ = A x, y = C x``.

The central object is the chain of subspaces

    S_0 = N(C),    S_k = A S_{k-1} ∩ S_0,

whose last member is ``{0}`` exactly when the pair is deadbeat observable.
The classes of states indistinguishable from ``x`` are affine translates of
the chain (``x + S_k``), and the one-step deadbeat observer for scalar
output moves the estimate to the intersection of two such translates.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .subspaces import (
    AffineSet,
    InvalidInputError,
    Subspace,
    affine_intersect,
    as_matrix,
    column_space,
    image,
    intersect,
    null_basis,
    null_space,
    preimage,
)


class NotObservableError(ValueError):
    """The pair (C, A) is not observable (or numerically indistinguishable from it)."""


class DegeneracyError(ArithmeticError):
    """A geometric construction that should yield a single point did not."""


# PBH rank tolerance relative to the stacked pencil; computed eigenvalues are
# only accurate to roughly eps * cond, so the MATLAB rank convention is too tight.
PBH_RTOL = 1e-8
ZERO_EIG_RTOL = 1e-8
# Relative rank cutoff for the subspace chain and class computations. Rounding
# in A S accumulates over n steps and defeats the eps-level default.
CHAIN_RTOL = 1e-9


@dataclass(frozen=True)
class LinearSystem:
    """Autonomous linear system ``x+ = A x``, ``y = C x``.

    ``tol`` is an absolute singular-value threshold used for every rank
    decision made on behalf of this system. With ``None`` the gain routines
    use the ``max(m, n) * eps * s_max`` convention and the set computations
    use ``CHAIN_RTOL * s_max``.
    """

    A: np.ndarray
    C: np.ndarray
    tol: Optional[float] = None

    def __post_init__(self):
        A = as_matrix(self.A)
        C = as_matrix(self.C)
        if A.shape[0] != A.shape[1]:
            raise InvalidInputError(f"A must be square, got shape {A.shape}")
        if C.shape[1] != A.shape[0]:
            raise InvalidInputError(
                f"C has {C.shape[1]} columns but A is {A.shape[0]}x{A.shape[0]}"
            )
        if self.tol is not None and not self.tol > 0:
            raise InvalidInputError("tol must be positive")
        A.setflags(write=False)
        C.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "C", C)

    @property
    def rank_kw(self) -> dict:
        """Rank-cutoff keywords for the set computations."""
        if self.tol is not None:
            return {"tol": self.tol}
        return {"rtol": CHAIN_RTOL}

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.C.shape[0]

    def output(self, x) -> np.ndarray:
        return self.C @ np.asarray(x, dtype=float)

    def to_dict(self) -> dict:
        return {"A": self.A.tolist(), "C": self.C.tolist()}

    @classmethod
    def from_dict(cls, data: dict, tol: Optional[float] = None) -> "LinearSystem":
        try:
            A, C = data["A"], data["C"]
        except (KeyError, TypeError) as exc:
            raise InvalidInputError("system needs keys 'A' and 'C'") from exc
        A = np.asarray(A, dtype=float)
        C = np.asarray(C, dtype=float)
        if A.ndim != 2 or C.ndim != 2:
            raise InvalidInputError("'A' and 'C' must be lists of rows")
        return cls(A, C, tol)

    def equals(self, other: "LinearSystem") -> bool:
        return (self.A.shape == other.A.shape and self.C.shape == other.C.shape
                and np.array_equal(self.A, other.A) and np.array_equal(self.C, other.C))


def load_system(path, tol: Optional[float] = None) -> LinearSystem:
    with open(path) as fh:
        data = json.load(fh)
    return LinearSystem.from_dict(data, tol)


def dump_system(sys: LinearSystem, path) -> None:
    with open(path, "w") as fh:
        json.dump(sys.to_dict(), fh, indent=2)
        fh.write("\n")


def observability_matrix(sys: LinearSystem) -> np.ndarray:
    """Stacked ``[C; CA; ...; CA^(n-1)]``."""
    blocks = [sys.C]
    for _ in range(sys.n - 1):
        blocks.append(blocks[-1] @ sys.A)
    return np.vstack(blocks)


def is_observable(sys: LinearSystem) -> bool:
    O = observability_matrix(sys)
    return np.linalg.matrix_rank(O, tol=sys.tol) == sys.n


# ---------------------------------------------------------------------------
# subspace chain and observability tests


@dataclass(frozen=True)
class SubspaceChain:
    subspaces: tuple

    @property
    def dims(self) -> tuple:
        return tuple(S.dim for S in self.subspaces)

    def __getitem__(self, k: int) -> Subspace:
        return self.subspaces[k]

    def __len__(self) -> int:
        return len(self.subspaces)


def subspace_chain(sys: LinearSystem, length: Optional[int] = None) -> SubspaceChain:
    """``S_0, ..., S_n`` with ``S_0 = N(C)`` and ``S_k = A S_{k-1} ∩ S_0``."""
    length = sys.n if length is None else length
    kw = sys.rank_kw
    S0 = null_space(sys.C, **kw)
    chain = [S0]
    for _ in range(length):
        chain.append(intersect(image(sys.A, chain[-1], **kw), S0, **kw))
    return SubspaceChain(tuple(chain))


def deadbeat_observable_via_sets(sys: LinearSystem) -> bool:
    return subspace_chain(sys)[sys.n].dim == 0


def _complex_rank(M: np.ndarray, tol: Optional[float], rtol: float) -> int:
    # rank over C of Mr + i Mi is half the rank of [[Mr, -Mi], [Mi, Mr]]
    Mr, Mi = M.real, M.imag
    R = np.block([[Mr, -Mi], [Mi, Mr]])
    s = np.linalg.svd(R, compute_uv=False)
    cutoff = tol if tol is not None else rtol * max(s[0], 1.0)
    return int(np.count_nonzero(s > cutoff)) // 2


def pbh_deadbeat_observable(sys: LinearSystem) -> bool:
    """PBH rank test restricted to the nonzero eigenvalues of A.

    ``rank [A - lam I; C] = n`` can only fail at an eigenvalue, so the
    quantifier over all nonzero complex ``lam`` reduces to the spectrum.

    Eigenvalues are computed in floating point, so a defective zero
    eigenvalue of multiplicity k may come back with modulus near eps^(1/k)
    and be tested as if it were nonzero. ``deadbeat_observable_via_sets``
    does not have this weakness.
    """
    n = sys.n
    try:
        eigs = np.linalg.eigvals(sys.A)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError("eigenvalue computation failed") from exc
    scale = max(1.0, float(np.linalg.norm(sys.A, 2)))
    for lam in eigs:
        if abs(lam) <= ZERO_EIG_RTOL * scale:
            continue
        pencil = np.vstack([sys.A - lam * np.eye(n), sys.C.astype(complex)])
        if _complex_rank(pencil, sys.tol, PBH_RTOL) < n:
            return False
    return True


# ---------------------------------------------------------------------------
# gains


@dataclass(frozen=True)
class ObserverGain:
    L: np.ndarray
    residual: float
    method: str = ""


def nilpotency_residual(A, L, C) -> float:
    """Frobenius norm of ``(A - L C)^n`` by ``n - 1`` left multiplications."""
    A = as_matrix(A)
    L = np.asarray(L, dtype=float).reshape(A.shape[0], -1)
    C = as_matrix(C)
    M = A - L @ C
    P = M.copy()
    for _ in range(A.shape[0] - 1):
        P = M @ P
    return float(np.linalg.norm(P, "fro"))


def _require_scalar_output(sys: LinearSystem) -> None:
    if sys.m != 1:
        raise InvalidInputError(f"scalar output required, C has {sys.m} rows")


def deadbeat_gain(sys: LinearSystem) -> ObserverGain:
    """Deadbeat gain by iterated subspace intersection.

    Mirrors the MATLAB routine::

        X = null(C);
        for i = 1:n-2
            X = null([C; null((A*X)')']);
        end
        Lpre = A*X;
        L = A*Lpre/(C*Lpre);

    After the loop ``X`` spans ``S_{n-2}``, so ``Lpre`` spans the line
    ``A S_{n-2}`` along which the estimate is moved onto the measured
    hyperplane.
    """
    _require_scalar_output(sys)
    A, C, n, tol = sys.A, sys.C, sys.n, sys.tol
    if not is_observable(sys):
        raise NotObservableError("pair (C, A) is not observable")
    if n == 1:
        L = A / C[0, 0]
        return ObserverGain(L, nilpotency_residual(A, L, C), "alg1")
    X = null_basis(C, tol)
    for _ in range(n - 2):
        X = null_basis(np.vstack([C, null_basis((A @ X).T, tol).T]), tol)
    if X.shape[1] != 1:
        raise NotObservableError(
            f"iterated intersection has dimension {X.shape[1]}, expected 1"
        )
    Lpre = A @ X
    denom = (C @ Lpre).item()
    if abs(denom) <= np.finfo(float).eps * np.linalg.norm(A, "fro") * np.linalg.norm(Lpre) * n:
        raise NotObservableError("C annihilates A S_(n-2); gain undefined")
    L = (A @ Lpre) / denom
    return ObserverGain(L, nilpotency_residual(A, L, C), "alg1")


def ackermann_gain(sys: LinearSystem) -> ObserverGain:
    """Ackermann's formula with all observer poles at zero.

    Same arithmetic as ``acker(A', C', zeros(n,1))'``: solve
    ``ctrb(A', C') X = (A')^n`` and take the last row of ``X``.
    """
    _require_scalar_output(sys)
    A, C, n = sys.A, sys.C, sys.n
    O = observability_matrix(sys)
    if np.linalg.matrix_rank(O, tol=sys.tol) < n:
        raise NotObservableError("observability matrix is singular")
    At = A.T
    P = At.copy()
    for _ in range(n - 1):
        P = P @ At
    try:
        X = np.linalg.solve(O.T, P)
    except np.linalg.LinAlgError as exc:
        raise NotObservableError("observability matrix is singular") from exc
    L = X[-1, :].reshape(n, 1)
    return ObserverGain(L, nilpotency_residual(A, L, C), "ackermann")


# ---------------------------------------------------------------------------
# equivalence classes


def _range_of_power(sys: LinearSystem, k: int) -> Subspace:
    return column_space(np.linalg.matrix_power(sys.A, k), **sys.rank_kw)


def equivalence_class(sys: LinearSystem, x, k: int,
                      chain: Optional[SubspaceChain] = None) -> AffineSet:
    """``[x]_k``: ``x + S_k`` if ``x`` lies in the range of ``A^k``, else empty."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if k < 0:
        raise InvalidInputError("class depth must be nonnegative")
    chain = chain if chain is not None and len(chain) > k else subspace_chain(sys, k)
    if k > 0 and not _range_of_power(sys, k).contains(x):
        return AffineSet.empty(sys.n)
    return AffineSet.from_point(x, chain[k])


def class_plus(sys: LinearSystem, x, k: int,
               chain: Optional[SubspaceChain] = None) -> AffineSet:
    """``[x]_k^+ = A [A^{-1} x]_k``.

    Empty unless ``x`` is in the range of ``A^(k+1)``; otherwise every
    preimage ``eta`` in the range of ``A^k`` maps the class to
    ``x + A S_k``. The minimum-norm such ``eta`` is used so the stored point
    is deterministic, and ``A eta`` reproduces ``x``.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if k == -1:
        return AffineSet.from_point(np.zeros(sys.n), Subspace.full(sys.n))
    if k < -1:
        raise InvalidInputError("class depth must be >= -1")
    if not _range_of_power(sys, k + 1).contains(x):
        return AffineSet.empty(sys.n)
    chain = chain if chain is not None and len(chain) > k else subspace_chain(sys, k)
    Rk = _range_of_power(sys, k).basis
    coeff, *_ = np.linalg.lstsq(sys.A @ Rk, x, rcond=None)
    eta = Rk @ coeff
    return AffineSet.from_point(sys.A @ eta, image(sys.A, chain[k], **sys.rank_kw))


def pi_index(sys: LinearSystem, xhat, y, p: int,
             chain: Optional[SubspaceChain] = None) -> int:
    """Deepest class level ``k`` in ``{-1, ..., p-2}`` whose forward class
    around ``xhat`` still meets the measurement set ``{z : C z = y}``."""
    if p < 1:
        raise InvalidInputError("p must be >= 1")
    measured = preimage(sys.C, np.atleast_1d(y), **sys.rank_kw)
    if p >= 2 and (chain is None or len(chain) < p - 1):
        chain = subspace_chain(sys, p - 2)
    for k in range(p - 2, -1, -1):
        cls_k = class_plus(sys, xhat, k, chain)
        if not affine_intersect(cls_k, measured).is_empty:
            return k
    return -1


# ---------------------------------------------------------------------------
# observer steps and simulation


def luenberger_step(sys: LinearSystem, L, xhat, y) -> np.ndarray:
    xhat = np.asarray(xhat, dtype=float).reshape(-1)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    L = np.asarray(L, dtype=float).reshape(sys.n, sys.m)
    return sys.A @ xhat + L @ (y - sys.C @ xhat)


def geometric_observer_step(sys: LinearSystem, xhat, y,
                            chain: Optional[SubspaceChain] = None) -> np.ndarray:
    """Move ``xhat`` along ``A S_{n-2}`` onto ``{z : C z = y}``, then apply A."""
    _require_scalar_output(sys)
    n = sys.n
    if n < 2:
        raise InvalidInputError("geometric observer needs n >= 2")
    xhat = np.asarray(xhat, dtype=float).reshape(-1)
    if chain is None or len(chain) < n - 1:
        chain = subspace_chain(sys, n - 2)
    line = AffineSet.from_point(xhat, image(sys.A, chain[n - 2], **sys.rank_kw))
    measured = preimage(sys.C, np.atleast_1d(y), **sys.rank_kw)
    meet = affine_intersect(line, measured)
    if not meet.is_singleton:
        raise DegeneracyError(
            f"intersection has affine dimension {meet.dim}; pair is numerically unobservable"
        )
    return sys.A @ meet.point


@dataclass
class ObserverTrace:
    """Plant states ``phi(k)``, observer states ``psi(k)`` and their gap."""

    plant_states: np.ndarray
    observer_states: np.ndarray
    errors: np.ndarray
    deadbeat_horizon: Optional[int]
    inputs: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        if not (len(self.plant_states) == len(self.observer_states) == len(self.errors)):
            raise ValueError("trace sequences have different lengths")

    @property
    def steps(self) -> int:
        return len(self.errors) - 1

    def write_csv(self, path_or_file) -> None:
        """CSV columns ``k, x_1..x_n, xhat_1..xhat_n, [u,] err``.

        The input applied at step ``k`` sits on row ``k``; the final row has
        no input and leaves ``u`` blank.
        """
        n = self.plant_states.shape[1]
        header = (["k"] + [f"x_{i + 1}" for i in range(n)]
                  + [f"xhat_{i + 1}" for i in range(n)])
        if self.inputs is not None:
            header.append("u")
        header.append("err")

        def fmt(v):
            return f"{float(v):.17g}"

        def write(fh):
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for k in range(len(self.errors)):
                row = [str(k)] + [fmt(v) for v in self.plant_states[k]]
                row += [fmt(v) for v in self.observer_states[k]]
                if self.inputs is not None:
                    row.append(fmt(self.inputs[k]) if k < len(self.inputs) else "")
                row.append(fmt(self.errors[k]))
                w.writerow(row)

        if hasattr(path_or_file, "write"):
            write(path_or_file)
        else:
            with open(path_or_file, "w", newline="") as fh:
                write(fh)


def deadbeat_horizon(plant_states, errors, tol: float) -> Optional[int]:
    """Smallest ``k`` after which every error is within ``tol`` (relative to
    ``max(1, |phi(k)|)``); ``None`` if the final error is still too large."""
    scale = np.maximum(1.0, np.linalg.norm(plant_states, axis=1))
    ok = np.asarray(errors) <= tol * scale
    if not ok[-1]:
        return None
    k = len(ok)
    while k > 0 and ok[k - 1]:
        k -= 1
    return k


def simulate_cascade(sys: LinearSystem, observer: Union[str, Sequence, np.ndarray],
                     x0, xhat0, steps: int, tol: float = 1e-10) -> ObserverTrace:
    """Run plant and observer side by side for ``steps`` steps.

    ``observer`` is either a gain matrix ``L`` (Luenberger update),
    ``"deadbeat"`` for the iterated-intersection gain, or ``"geometric"``
    for the set-intersection update.
    """
    if steps < 0:
        raise InvalidInputError("steps must be nonnegative")
    x = np.asarray(x0, dtype=float).reshape(-1)
    xhat = np.asarray(xhat0, dtype=float).reshape(-1)
    if x.shape[0] != sys.n or xhat.shape[0] != sys.n:
        raise InvalidInputError(f"initial states must have {sys.n} entries")

    if isinstance(observer, str):
        if observer == "geometric":
            chain = subspace_chain(sys, max(sys.n - 2, 0))

            def step(xh, y):
                return geometric_observer_step(sys, xh, y, chain)
        elif observer == "deadbeat":
            L = deadbeat_gain(sys).L

            def step(xh, y):
                return luenberger_step(sys, L, xh, y)
        else:
            raise InvalidInputError(f"unknown observer {observer!r}")
    else:
        L = np.asarray(observer, dtype=float).reshape(sys.n, sys.m)

        def step(xh, y):
            return luenberger_step(sys, L, xh, y)

    xs, xhs = [x], [xhat]
    for _ in range(steps):
        y = sys.C @ x
        xhat = step(xhat, y)
        x = sys.A @ x
        xs.append(x)
        xhs.append(xhat)
    xs, xhs = np.array(xs), np.array(xhs)
    errors = np.linalg.norm(xhs - xs, axis=1)
    return ObserverTrace(xs, xhs, errors, deadbeat_horizon(xs, errors, tol))
