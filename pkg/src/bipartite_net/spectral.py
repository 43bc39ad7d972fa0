"""Ground truth from the Laplacian null space."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOL, Subspace, Tolerances
from .network import gauge_vector
from .topology import NbsRecord


@dataclass(frozen=True)
class NullSpaceAnalysis:
    basis: Subspace
    eigenvalues: np.ndarray
    block_dim: int
    eps: float

    @property
    def n_nodes(self) -> int:
        return self.basis.ambient_dim // self.block_dim

    @property
    def nullity(self) -> int:
        return self.basis.dim

    @property
    def per_node_blocks(self) -> np.ndarray:
        """Array of shape ``(nullity, N, d)``: the d-blocks of every basis vector."""
        return self.basis.basis.T.reshape(self.nullity, self.n_nodes, self.block_dim)

    @property
    def smallest_positive(self) -> float | None:
        pos = self.eigenvalues[self.eigenvalues > self.eps]
        return float(pos[0]) if pos.size else None


@dataclass(frozen=True)
class BipartiteStructure:
    is_bipartite: bool
    gauge: tuple[int, ...] | None
    common_space: Subspace | None
    residual: float


def analyze_null(L: np.ndarray, block_dim: int, tol: Tolerances = DEFAULT_TOL) -> NullSpaceAnalysis:
    w, V = np.linalg.eigh(L)
    eps = tol.eig_zero_rel * max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    return NullSpaceAnalysis(Subspace(V[:, np.abs(w) <= eps].copy()), w, block_dim, eps)


def steady_state(analysis: NullSpaceAnalysis, x0) -> np.ndarray:
    """Orthogonal projection of ``x0`` onto null(L): the limit of ``x' = -Lx``."""
    x0 = np.asarray(x0, dtype=float)
    if x0.shape[0] != analysis.basis.ambient_dim:
        raise ValueError(f"state has length {x0.shape[0]}, expected {analysis.basis.ambient_dim}")
    return analysis.basis.project(x0)


def bipartite_structure(analysis: NullSpaceAnalysis, tol: Tolerances = DEFAULT_TOL,
                        basis: np.ndarray | None = None) -> BipartiteStructure:
    """Test whether null(L) equals ``span(D (1_N ⊗ Psi))`` for some gauge ``D``.

    Every node's block rows are compared with node 1's, up to a sign chosen
    per node. ``basis`` may replace the computed eigenbasis by any other
    orthonormal basis of the same space.
    """
    Z = analysis.basis.basis if basis is None else np.asarray(basis, float)
    m = Z.shape[1]
    N, d = analysis.n_nodes, analysis.block_dim
    if m == 0:
        return BipartiteStructure(False, None, None, float("inf"))
    blocks = Z.reshape(N, d, m)
    ref = blocks[0]
    signs, residual = [1], 0.0
    for i in range(1, N):
        plus = np.linalg.norm(blocks[i] - ref)
        minus = np.linalg.norm(blocks[i] + ref)
        signs.append(1 if plus <= minus else -1)
        residual = max(residual, min(plus, minus))
    sv = np.linalg.svd(ref, compute_uv=False)
    ref_rank = int(np.sum(sv > tol.rank_rel * max(1.0 / np.sqrt(N), sv[0] if sv.size else 0.0)))
    ok = residual < tol.structure * (1.0 + np.linalg.norm(Z, 2)) and ref_rank == m
    common = Subspace.span(ref, d, tol) if ok else None
    return BipartiteStructure(bool(ok), tuple(signs) if ok else None, common, float(residual))


def containment_residual(nbs: NbsRecord, L: np.ndarray) -> float:
    """Largest ``|L D (1 ⊗ v)|`` over the unit basis vectors of the NBS null space."""
    signs = nbs.partition.signs
    worst = 0.0
    for v in nbs.null_space.basis.T:
        worst = max(worst, float(np.linalg.norm(L @ gauge_vector(signs, v))))
    return worst


def check_containment(nbs: NbsRecord, L: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff ``span(D (1_N ⊗ B)) ⊂ null(L)`` for the record's gauge and null space."""
    return containment_residual(nbs, L) <= 10 * tol.eig_eps(L)
