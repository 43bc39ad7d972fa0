"""Numerical primitives for symmetric matrices and linear subspaces.

Every cutoff is relative to ``max(1, spectral radius)`` so that badly
scaled weights classify the same way as well scaled ones.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import subspace_angles


@dataclass(frozen=True)
class Tolerances:
    """Numerical cutoffs shared by every module.

    ``structure`` is the blockwise residual allowed when testing a null
    space for bipartite structure; it is looser than the others because it
    compares computed eigenvectors rather than exact quantities.
    """

    rank_rel: float = 1e-9
    eig_zero_rel: float = 1e-9
    tol_ortho: float = 1e-10
    structure: float = 1e-6

    def __post_init__(self):
        for name in ("rank_rel", "eig_zero_rel", "tol_ortho", "structure"):
            value = getattr(self, name)
            if not (0.0 < value < 1e-3):
                raise ValueError(f"tolerance {name}={value!r} must lie in (0, 1e-3)")

    def eig_eps(self, M: np.ndarray) -> float:
        """Zero cutoff for the eigenvalues of ``M``."""
        return self.eig_zero_rel * max(1.0, spectral_radius(M))


DEFAULT_TOL = Tolerances()


class SignClass(enum.Enum):
    POSITIVE = 1
    NEGATIVE = -1
    ZERO = 0
    INDEFINITE = "indefinite"

    @property
    def sign(self) -> int:
        if self is SignClass.INDEFINITE:
            raise ValueError("an indefinite matrix has no sign")
        return self.value

    def negated(self) -> "SignClass":
        if self is SignClass.POSITIVE:
            return SignClass.NEGATIVE
        if self is SignClass.NEGATIVE:
            return SignClass.POSITIVE
        return self


def as_symmetric(M) -> np.ndarray:
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.array_equal(A, A.T):
        raise ValueError("matrix is not symmetric")
    return A


def spectral_radius(M: np.ndarray) -> float:
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvalsh(M))))


def classify_sign(M, tol: Tolerances = DEFAULT_TOL) -> tuple[SignClass, np.ndarray | None]:
    """Matrix sign of ``M`` together with ``|M| = sgn(M) * M``.

    The magnitude is ``None`` for indefinite matrices.
    """
    A = as_symmetric(M)
    w = np.linalg.eigvalsh(A)
    eps = tol.eig_zero_rel * max(1.0, float(np.max(np.abs(w))))
    if np.all(np.abs(w) <= eps):
        return SignClass.ZERO, np.zeros_like(A)
    if np.all(w >= -eps):
        return SignClass.POSITIVE, A.copy()
    if np.all(w <= eps):
        return SignClass.NEGATIVE, -A
    return SignClass.INDEFINITE, None


class Subspace:
    """A linear subspace stored by an orthonormal basis (columns of ``basis``).

    Bases are not unique, so equality is decided by principal angles
    (:meth:`same_as`), never by comparing basis entries.
    """

    __slots__ = ("_basis",)

    def __init__(self, basis: np.ndarray):
        basis = np.asarray(basis, dtype=float)
        if basis.ndim != 2:
            raise ValueError("basis must be a 2-D array of column vectors")
        self._basis = basis
        self._basis.setflags(write=False)

    @classmethod
    def span(cls, vectors, ambient_dim: int | None = None,
             tol: Tolerances = DEFAULT_TOL) -> "Subspace":
        """Orthonormalized span of the columns of ``vectors``."""
        V = np.asarray(vectors, dtype=float)
        if V.ndim == 1:
            V = V[:, None]
        if ambient_dim is None:
            ambient_dim = V.shape[0]
        if V.size == 0:
            return cls.zero(ambient_dim)
        if V.shape[0] != ambient_dim:
            raise ValueError("vector length does not match ambient dimension")
        U, s, _ = np.linalg.svd(V, full_matrices=False)
        cutoff = tol.rank_rel * max(1.0, s[0] if s.size else 0.0)
        return cls(U[:, s > cutoff])

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(np.zeros((ambient_dim, 0)))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(np.eye(ambient_dim))

    @property
    def basis(self) -> np.ndarray:
        return self._basis

    @property
    def ambient_dim(self) -> int:
        return self._basis.shape[0]

    @property
    def dim(self) -> int:
        return self._basis.shape[1]

    def __len__(self) -> int:
        return self.dim

    def __bool__(self) -> bool:
        return self.dim > 0

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"

    def projector(self) -> np.ndarray:
        return self._basis @ self._basis.T

    def complement_projector(self) -> np.ndarray:
        return np.eye(self.ambient_dim) - self.projector()

    def project(self, x: np.ndarray) -> np.ndarray:
        return self._basis @ (self._basis.T @ x)

    def residual(self, x) -> float:
        """Distance from ``x`` to the subspace."""
        x = np.asarray(x, dtype=float)
        return float(np.linalg.norm(x - self.project(x)))

    def contains(self, other: "Subspace | np.ndarray", atol: float = 1e-8) -> bool:
        vectors = other.basis if isinstance(other, Subspace) else np.asarray(other, float)
        if vectors.ndim == 1:
            vectors = vectors[:, None]
        if vectors.shape[1] == 0:
            return True
        res = vectors - self.project(vectors)
        scale = np.maximum(1.0, np.linalg.norm(vectors, axis=0))
        return bool(np.all(np.linalg.norm(res, axis=0) <= atol * scale))

    def principal_angles(self, other: "Subspace") -> np.ndarray:
        if self.dim == 0 or other.dim == 0:
            return np.zeros(0)
        return subspace_angles(self._basis, other.basis)

    def same_as(self, other: "Subspace", atol: float = 1e-8) -> bool:
        if self.ambient_dim != other.ambient_dim or self.dim != other.dim:
            return False
        return bool(np.all(self.principal_angles(other) <= atol))

    def is_orthonormal(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        G = self._basis.T @ self._basis
        return bool(np.all(np.abs(G - np.eye(self.dim)) < tol.tol_ortho * max(1, self.dim)))


def null_basis(M, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of the eigenspace of ``M`` for eigenvalues near zero."""
    A = np.asarray(M, dtype=float)
    w, V = np.linalg.eigh(A)
    eps = tol.eig_zero_rel * max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    return Subspace(V[:, np.abs(w) <= eps].copy())


def matrix_nullity(M: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> int:
    """Numerical nullity of a (possibly rectangular) matrix via SVD."""
    M = np.asarray(M, dtype=float)
    n = M.shape[1]
    if M.shape[0] == 0:
        return n
    s = np.linalg.svd(M, compute_uv=False)
    cutoff = tol.rank_rel * max(1.0, s[0] if s.size else 0.0)
    return n - int(np.sum(s > cutoff))


def _check_same_ambient(*spaces: Subspace) -> int:
    dims = {S.ambient_dim for S in spaces}
    if len(dims) != 1:
        raise ValueError(f"subspaces live in different ambient spaces: {sorted(dims)}")
    return dims.pop()


def intersect(S1: Subspace, S2: Subspace, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """``S1 ∩ S2`` as the null space of the stacked complement projectors."""
    n = _check_same_ambient(S1, S2)
    if S1.dim == 0 or S2.dim == 0:
        return Subspace.zero(n)
    if S1.dim == n:
        return S2
    if S2.dim == n:
        return S1
    stacked = np.vstack([S1.complement_projector(), S2.complement_projector()])
    _, s, Vt = np.linalg.svd(stacked)
    s = np.concatenate([s, np.zeros(n - s.size)])
    # singular values of a stacked projector pair are bounded by sqrt(2)
    keep = s <= tol.rank_rel * np.sqrt(2.0)
    return Subspace.span(Vt[keep].T, n, tol)


def intersect_all(spaces: Iterable[Subspace], ambient_dim: int,
                  tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """Intersection of many subspaces; the empty intersection is the whole space."""
    result = Subspace.full(ambient_dim)
    for S in spaces:
        result = intersect(result, S, tol)
        if result.dim == 0:
            break
    return result


def minkowski_sum(S1: Subspace, S2: Subspace, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    n = _check_same_ambient(S1, S2)
    return Subspace.span(np.hstack([S1.basis, S2.basis]), n, tol)


def sum_all(spaces: Sequence[Subspace], ambient_dim: int,
            tol: Tolerances = DEFAULT_TOL) -> Subspace:
    if not spaces:
        return Subspace.zero(ambient_dim)
    _check_same_ambient(*spaces)
    return Subspace.span(np.hstack([S.basis for S in spaces]), ambient_dim, tol)


def bases_independent(bases: Sequence[Subspace], tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff the concatenated basis vectors have full column rank."""
    bases = [B for B in bases]
    if not bases:
        return True
    _check_same_ambient(*bases)
    stacked = np.hstack([B.basis for B in bases])
    total = stacked.shape[1]
    if total == 0:
        return True
    if total > stacked.shape[0]:
        return False
    s = np.linalg.svd(stacked, compute_uv=False)
    return bool(np.sum(s > tol.rank_rel * max(1.0, s[0])) == total)
