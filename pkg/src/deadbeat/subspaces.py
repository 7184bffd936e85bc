"""Linear and affine subspaces of R^n held as orthonormal bases.

Rank decisions are made on singular values. Unless a tolerance is passed
explicitly, a singular value counts as zero when it does not exceed
``max(rows, cols) * eps * s_max`` (the convention of MATLAB's ``null`` and
``rank``).

The zero subspace is a basis with zero columns, never a zero column.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

EPS = np.finfo(float).eps

#: Containment / membership tolerance used when a Subspace does not carry one.
MEMBER_TOL = 1e-9


class InvalidInputError(ValueError):
    """Raised on malformed numerical input (non-finite entries, bad shapes)."""


def as_matrix(M) -> np.ndarray:
    """Return ``M`` as a finite 2-D float array, raising InvalidInputError."""
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[np.newaxis, :]
    if M.ndim != 2:
        raise InvalidInputError(f"expected a 2-D matrix, got ndim={M.ndim}")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError("matrix has non-finite entries")
    return M


def default_tol(M: np.ndarray, s: Optional[np.ndarray] = None) -> float:
    if s is None:
        s = np.linalg.svd(M, compute_uv=False)
    smax = s[0] if s.size else 0.0
    return max(M.shape) * EPS * smax


def rank_threshold(M: np.ndarray, s: np.ndarray, tol=None, rtol=None) -> float:
    """Singular-value cutoff: ``max(tol, rtol * s_max)``, or the default when both are None."""
    if tol is None and rtol is None:
        return default_tol(M, s)
    smax = s[0] if s.size else 0.0
    return max(tol or 0.0, (rtol or 0.0) * smax)


def _svd_split(M, tol, rtol=None):
    """Numerical rank of M and its full SVD factors."""
    u, s, vh = np.linalg.svd(M, full_matrices=True)
    tol = rank_threshold(M, s, tol, rtol)
    rank = int(np.count_nonzero(s > tol))
    return rank, u, s, vh


@dataclass(frozen=True)
class Subspace:
    """Subspace of R^n spanned by the orthonormal columns of ``basis``."""

    basis: np.ndarray
    tol: float = MEMBER_TOL
    ambient_dim: int = field(init=False)

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=float)
        if B.ndim != 2:
            raise InvalidInputError("basis must be a 2-D array")
        n, d = B.shape
        if d > n:
            raise InvalidInputError(f"{d} basis vectors in R^{n}")
        if not np.all(np.isfinite(B)):
            raise InvalidInputError("basis has non-finite entries")
        if d and not np.allclose(B.T @ B, np.eye(d), atol=1e-10, rtol=0):
            raise InvalidInputError("basis columns are not orthonormal")
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)
        object.__setattr__(self, "ambient_dim", n)

    @classmethod
    def zero(cls, n: int, tol: float = MEMBER_TOL) -> "Subspace":
        return cls(np.zeros((n, 0)), tol)

    @classmethod
    def full(cls, n: int, tol: float = MEMBER_TOL) -> "Subspace":
        return cls(np.eye(n), tol)

    @classmethod
    def span(cls, *vectors, tol: Optional[float] = None) -> "Subspace":
        """Subspace spanned by the given vectors (rank decided at ``tol``)."""
        return column_space(np.column_stack(vectors), tol)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def distance(self, v) -> float:
        """Euclidean distance from ``v`` to the subspace."""
        v = np.asarray(v, dtype=float)
        return float(np.linalg.norm(v - self.basis @ (self.basis.T @ v)))

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=float)
        return self.distance(v) <= self.tol * max(1.0, float(np.linalg.norm(v)))

    def issubspace(self, other: "Subspace") -> bool:
        """True if ``self`` is contained in ``other`` within tolerance."""
        _check_dims(self, other)
        if self.dim == 0:
            return True
        resid = self.basis - other.basis @ (other.basis.T @ self.basis)
        return float(np.linalg.norm(resid, 2)) <= max(self.tol, other.tol)

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def _check_dims(S: Subspace, T: Subspace) -> None:
    if S.ambient_dim != T.ambient_dim:
        raise InvalidInputError(
            f"ambient dimensions differ: {S.ambient_dim} vs {T.ambient_dim}"
        )


def null_basis(M, tol: Optional[float] = None, rtol: Optional[float] = None) -> np.ndarray:
    """Orthonormal null-space basis of ``M`` as a plain array (MATLAB ``null``)."""
    M = as_matrix(M)
    if M.size == 0:
        return np.eye(M.shape[1])
    rank, _, _, vh = _svd_split(M, tol, rtol)
    return vh[rank:].T.copy()


def null_space(M, tol: Optional[float] = None, rtol: Optional[float] = None) -> Subspace:
    """Null space ``{v : M v = 0}`` of a matrix.

    Parameters
    ----------
    M : array_like, shape (m, n)
        A 1-D input is read as a single row.
    tol, rtol : float, optional
        Singular values ``<= max(tol, rtol * s_max)`` count as zero. With
        neither given the cutoff is ``max(m, n) * eps * s_max``.

    Returns
    -------
    Subspace
        Orthonormal basis of dimension ``n - rank(M)``.
    """
    return Subspace(null_basis(M, tol, rtol))


def column_space(M, tol: Optional[float] = None, rtol: Optional[float] = None) -> Subspace:
    """Range of ``M``: orthonormal basis for the span of its columns."""
    M = as_matrix(M)
    if M.shape[1] == 0:
        return Subspace.zero(M.shape[0])
    rank, u, _, _ = _svd_split(M, tol, rtol)
    return Subspace(u[:, :rank].copy())


def orth_complement(S: Subspace) -> Subspace:
    n, d = S.basis.shape
    if d == 0:
        return Subspace.full(n, S.tol)
    if d == n:
        return Subspace.zero(n, S.tol)
    # trailing left singular vectors of an orthonormal basis span its complement
    u, _, _ = np.linalg.svd(S.basis, full_matrices=True)
    return Subspace(u[:, d:].copy(), S.tol)


def image(A, S: Subspace, tol: Optional[float] = None,
          rtol: Optional[float] = None) -> Subspace:
    """Image ``A S`` of a subspace under a linear map.

    Relative cutoffs are taken against ``||A||_2``, not against ``A`` times
    the basis, so a direction that ``A`` nearly annihilates is dropped even
    when it is the only one.
    """
    A = as_matrix(A)
    if A.shape[1] != S.ambient_dim:
        raise InvalidInputError(
            f"map with {A.shape[1]} columns applied to a subspace of R^{S.ambient_dim}"
        )
    if S.dim == 0:
        return Subspace.zero(A.shape[0], S.tol)
    AB = A @ S.basis
    a_norm = float(np.linalg.norm(A, 2))
    if tol is None:
        rel = max(AB.shape) * EPS if rtol is None else rtol
        tol = rel * a_norm
    elif rtol is not None:
        tol = max(tol, rtol * a_norm)
    out = column_space(AB, tol)
    return Subspace(out.basis, S.tol)


def constraint_rows(S: Subspace) -> np.ndarray:
    """Rows whose common null space is ``S`` (basis of the complement, transposed)."""
    return orth_complement(S).basis.T


def intersect(S: Subspace, T: Subspace, tol: Optional[float] = None,
              rtol: Optional[float] = None) -> Subspace:
    """Intersection of two subspaces.

    Computed as the null space of the stacked complement rows of ``S`` and
    ``T``, the same construction as ``null([C; null((A*X)')'])``.
    """
    _check_dims(S, T)
    n = S.ambient_dim
    if S.dim == 0 or T.dim == 0:
        return Subspace.zero(n, S.tol)
    stacked = np.vstack([constraint_rows(S), constraint_rows(T)])
    if stacked.shape[0] == 0:
        return Subspace.full(n, S.tol)
    return Subspace(null_basis(stacked, tol, rtol), S.tol)


def subspace_equal(S: Subspace, T: Subspace) -> bool:
    _check_dims(S, T)
    return S.dim == T.dim and S.issubspace(T) and T.issubspace(S)


@dataclass(frozen=True)
class AffineSet:
    """Either the empty set (``point is None``) or ``point + direction``."""

    point: Optional[np.ndarray]
    direction: Optional[Subspace]
    ambient_dim: int

    @classmethod
    def empty(cls, n: int) -> "AffineSet":
        return cls(None, None, n)

    @classmethod
    def from_point(cls, point, direction: Subspace) -> "AffineSet":
        p = np.asarray(point, dtype=float).reshape(-1)
        if p.shape[0] != direction.ambient_dim:
            raise InvalidInputError("point and direction live in different spaces")
        if not np.all(np.isfinite(p)):
            raise InvalidInputError("point has non-finite entries")
        p.setflags(write=False)
        return cls(p, direction, direction.ambient_dim)

    @classmethod
    def singleton(cls, point) -> "AffineSet":
        p = np.asarray(point, dtype=float).reshape(-1)
        return cls.from_point(p, Subspace.zero(p.shape[0]))

    @property
    def is_empty(self) -> bool:
        return self.point is None

    @property
    def is_singleton(self) -> bool:
        return not self.is_empty and self.direction.dim == 0

    @property
    def dim(self) -> int:
        """Affine dimension; -1 for the empty set."""
        return -1 if self.is_empty else self.direction.dim

    def contains(self, x) -> bool:
        if self.is_empty:
            return False
        x = np.asarray(x, dtype=float).reshape(-1)
        scale = max(1.0, float(np.linalg.norm(x)), float(np.linalg.norm(self.point)))
        return self.direction.distance(x - self.point) <= self.direction.tol * scale

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def equals(self, other: "AffineSet") -> bool:
        if self.ambient_dim != other.ambient_dim:
            raise InvalidInputError("ambient dimensions differ")
        if self.is_empty or other.is_empty:
            return self.is_empty and other.is_empty
        return subspace_equal(self.direction, other.direction) and self.contains(
            other.point
        )

    def __repr__(self) -> str:
        if self.is_empty:
            return f"AffineSet(empty, ambient_dim={self.ambient_dim})"
        return f"AffineSet(point={self.point.tolist()}, dim={self.dim})"


def preimage(M, y, tol: Optional[float] = None, rtol: Optional[float] = None) -> AffineSet:
    """Solution set ``{x : M x = y}``; empty when ``y`` is not in the range of ``M``."""
    M = as_matrix(M)
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != M.shape[0]:
        raise InvalidInputError(f"right-hand side has {y.shape[0]} entries, expected {M.shape[0]}")
    rank, u, s, vh = _svd_split(M, tol, rtol)
    direction = Subspace(vh[rank:].T.copy())
    x = vh[:rank].T @ ((u[:, :rank].T @ y) / s[:rank])
    resid = float(np.linalg.norm(M @ x - y))
    scale = max(1.0, float(np.linalg.norm(y)))
    if resid > MEMBER_TOL * scale:
        return AffineSet.empty(M.shape[1])
    return AffineSet.from_point(x, direction)


def affine_intersect(P: AffineSet, Q: AffineSet, tol: Optional[float] = None,
                     rtol: Optional[float] = None) -> AffineSet:
    """Intersection of two affine sets.

    Both sets are rewritten as linear equations ``N^T z = N^T p`` (``N`` a
    basis of the direction's complement) and the stacked system is solved in
    the least-squares sense. A nonzero residual means the sets are disjoint;
    otherwise the returned point is the minimum-norm point of the
    intersection.
    """
    if P.ambient_dim != Q.ambient_dim:
        raise InvalidInputError("ambient dimensions differ")
    n = P.ambient_dim
    if P.is_empty or Q.is_empty:
        return AffineSet.empty(n)
    Np = constraint_rows(P.direction)
    Nq = constraint_rows(Q.direction)
    M = np.vstack([Np, Nq])
    if M.shape[0] == 0:
        # both are the whole space
        return AffineSet.from_point(np.zeros(n), Subspace.full(n, P.direction.tol))
    rhs = np.concatenate([Np @ P.point, Nq @ Q.point])
    rank, u, s, vh = _svd_split(M, tol, rtol)
    z = vh[:rank].T @ ((u[:, :rank].T @ rhs) / s[:rank])
    direction = Subspace(vh[rank:].T.copy(), P.direction.tol)
    scale = max(1.0, float(np.linalg.norm(P.point)), float(np.linalg.norm(Q.point)))
    tol_member = max(P.direction.tol, Q.direction.tol)
    if (P.direction.distance(z - P.point) > tol_member * scale
            or Q.direction.distance(z - Q.point) > tol_member * scale):
        return AffineSet.empty(n)
    return AffineSet.from_point(z, direction)
