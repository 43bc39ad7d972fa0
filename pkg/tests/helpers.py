"""Random matrix and network generators shared by the test modules."""
from __future__ import annotations

import itertools

import numpy as np

from bipartite_net import MatrixGraph
from bipartite_net.topology import Bipartition


def orthonormal(rng, d, k):
    Q, _ = np.linalg.qr(rng.standard_normal((d, max(k, 1))))
    return Q[:, :k]


def random_definite(rng, d, sign=1):
    Q = orthonormal(rng, d, d)
    M = (Q * rng.uniform(0.5, 2.0, d)) @ Q.T
    return sign * (M + M.T) / 2


def random_semidefinite(rng, d, null_vectors=None, null_dim=None, sign=1):
    """Nonzero PSD (times ``sign``) whose null space is exactly span(null_vectors).

    Without ``null_vectors`` a random null space of dimension ``null_dim``
    (random in 1..d-1 when omitted) is used.
    """
    if null_vectors is None:
        k = null_dim if null_dim is not None else int(rng.integers(1, d))
        N = orthonormal(rng, d, k)
    else:
        N, _ = np.linalg.qr(np.asarray(null_vectors, float).reshape(-1, d).T)
    P = np.eye(d) - N @ N.T
    R = random_definite(rng, d)
    M = P @ R @ P
    return sign * (M + M.T) / 2


def random_tree(rng, n):
    """Edges of a uniformly labelled random recursive tree on 1..n."""
    return [(int(rng.integers(1, k)), k) for k in range(2, n + 1)]


def random_mixed_graph(rng, n_max=8, d_max=4, p_extra=0.3, p_definite=0.5):
    """Connected graph with independently random edge signs and (semi)definiteness."""
    n = int(rng.integers(2, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    pairs = set(tuple(sorted(e)) for e in random_tree(rng, n))
    for u, v in itertools.combinations(range(1, n + 1), 2):
        if (u, v) not in pairs and rng.random() < p_extra:
            pairs.add((u, v))
    edges = []
    for u, v in sorted(pairs):
        sign = 1 if rng.random() < 0.5 else -1
        if d == 1 or rng.random() < p_definite:
            W = random_definite(rng, d, sign)
        else:
            W = random_semidefinite(rng, d, sign=sign)
        edges.append((u, v, W))
    return MatrixGraph.from_edges(n, d, edges)


def random_pn_tree_graph(rng, n_max=8, d_max=4):
    """Graph with a definite (positive-negative) spanning tree.

    The tree and the consistent extra edges agree with a hidden bipartition.
    The inconsistent extras are semidefinite and share a null vector only in
    some draws, so both outcomes of the uniqueness test occur.
    """
    n = int(rng.integers(3, n_max + 1))
    d = int(rng.integers(2, d_max + 1))
    part = Bipartition.from_mask(n, int(rng.integers(0, 2 ** (n - 1))))
    cons = lambda u, v: part.sigma(u) * part.sigma(v)  # noqa: E731
    b = orthonormal(rng, d, 1)[:, 0]
    mode = rng.choice(["shared", "random", "definite", "balanced"])
    tree = set(tuple(sorted(e)) for e in random_tree(rng, n))
    edges = [(u, v, random_definite(rng, d, cons(u, v))) for u, v in sorted(tree)]
    others = [p for p in itertools.combinations(range(1, n + 1), 2) if p not in tree]
    rng.shuffle(others)
    n_extra = int(rng.integers(1, min(len(others), 4) + 1)) if others else 0
    for k, (u, v) in enumerate(others[:n_extra]):
        s = cons(u, v)
        if mode == "balanced" or (k % 2 == 1 and rng.random() < 0.5):
            W = random_semidefinite(rng, d, sign=s) if rng.random() < 0.5 else random_definite(rng, d, s)
        elif mode == "shared":
            extra = orthonormal(rng, d, d)[:, : int(rng.integers(0, d - 1))]
            W = random_semidefinite(rng, d, null_vectors=np.column_stack([b, extra]).T, sign=-s)
        elif mode == "definite" and k == 0:
            W = random_definite(rng, d, -s)
        else:
            W = random_semidefinite(rng, d, sign=-s)
        edges.append((u, v, W))
    return MatrixGraph.from_edges(n, d, edges)


def compliant_graph(rng):
    """Two continents with internal NBS chords joined by independent semidefinite paths.

    Built so that every sufficient condition holds generically: the chords and
    one edge of each crossing path are inconsistent with a hidden bipartition
    and share a null vector ``b``; every other path edge is consistent with a
    generic one-dimensional null space.
    """
    d = int(rng.integers(2, 5))
    b = orthonormal(rng, d, 1)[:, 0]
    sizes = [int(rng.integers(3, 5)), int(rng.integers(3, 5))]
    K1 = list(range(1, sizes[0] + 1))
    K2 = list(range(sizes[0] + 1, sizes[0] + sizes[1] + 1))
    n_free = int(rng.integers(1, 3))
    n_cross = int(rng.integers(1, 3))
    lengths_free = [int(rng.integers(1, min(3, d - 1) + 1)) for _ in range(n_free)]
    lengths_cross = [int(rng.integers(1, min(3, d) + 1)) for _ in range(n_cross)]
    n = sizes[0] + sizes[1] + sum(L - 1 for L in lengths_free + lengths_cross)
    part = Bipartition.from_mask(n, int(rng.integers(0, 2 ** (n - 1))))
    cons = lambda u, v: part.sigma(u) * part.sigma(v)  # noqa: E731

    def generic_null():
        while True:
            c = orthonormal(rng, d, 1)[:, 0]
            if abs(c @ b) < 0.9:
                return c

    edges, used = [], set()

    def add(u, v, W):
        used.add(tuple(sorted((u, v))))
        edges.append((u, v, W))

    for K in (K1, K2):
        for a, c in zip(K, K[1:]):
            add(a, c, random_definite(rng, d, cons(a, c)))
        add(K[0], K[-1], random_semidefinite(rng, d, null_vectors=[b], sign=-cons(K[0], K[-1])))

    nxt = sizes[0] + sizes[1] + 1
    for L, crossing in [(L, False) for L in lengths_free] + [(L, True) for L in lengths_cross]:
        for _ in range(50):
            a, c = int(rng.choice(K1)), int(rng.choice(K2))
            if L > 1 or (a, c) not in used:
                break
        else:
            continue
        nodes = [a] + list(range(nxt, nxt + L - 1)) + [c]
        nxt += L - 1
        nbs_at = int(rng.integers(0, L)) if crossing else -1
        # edge nulls along one path stay independent of each other and of b
        picks = []
        for i, (u, v) in enumerate(zip(nodes, nodes[1:])):
            if i == nbs_at:
                add(u, v, random_semidefinite(rng, d, null_vectors=[b], sign=-cons(u, v)))
                continue
            while True:
                c_vec = generic_null()
                if np.linalg.matrix_rank(np.column_stack(picks + [c_vec, b]), tol=1e-3) == len(picks) + 2:
                    break
            picks.append(c_vec)
            add(u, v, random_semidefinite(rng, d, null_vectors=[c_vec], sign=cons(u, v)))
    used_nodes = sorted({x for u, v, _ in edges for x in (u, v)})
    relabel = {old: new for new, old in enumerate(used_nodes, 1)}
    return MatrixGraph.from_edges(len(used_nodes), d,
                                  [(relabel[u], relabel[v], W) for u, v, W in edges])


# criterion number -> (passed, detail), filled by test_acceptance and printed by conftest
ACCEPTANCE: dict[int, tuple[bool, str]] = {}
