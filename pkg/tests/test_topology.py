import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bipartite_net.fixtures import A1, A_DEF, g1, g2, g3, g4
from bipartite_net.linalg import Subspace
from bipartite_net.network import MatrixGraph
from bipartite_net.topology import (Bipartition, EnumerationLimitError, decompose_continents,
                                    find_all_nbs, inconsistent_edges, internal_gauge_consistency,
                                    is_connected, is_structurally_balanced, semidefinite_paths,
                                    underlying_graph)

from helpers import random_mixed_graph, random_pn_tree_graph


def test_bipartition_conventions():
    p = Bipartition.from_signs([-1, 1, -1, 1])
    assert p.v2 == {2, 4} and p.signs == (1, -1, 1, -1)
    assert Bipartition.from_mask(4, p.mask) == p
    assert p.v1 == {1, 3}
    with pytest.raises(ValueError):
        Bipartition(3, frozenset({1}))
    with pytest.raises(ValueError):
        Bipartition(3, frozenset({4}))


@pytest.mark.parametrize("make", [g1, g3, g4])
def test_two_continents_and_three_islands(make):
    dec = decompose_continents(make())
    assert dec.continents == (frozenset({1, 2, 3}), frozenset({4, 5, 6}))
    assert dec.islands == {7, 8, 9}
    # (1,2) and (2,3) negative, (4,5) positive, (5,6) negative
    assert [dec.gauge[i] for i in range(1, 7)] == [1, -1, 1, 1, 1, -1]
    assert dec.continent_of(8) is None and dec.representative(1) == 4


def test_g1_semidefinite_paths():
    G = g1()
    dec = decompose_continents(G)
    assert semidefinite_paths(G, dec, 0, 1) == [(1, 7, 8, 4), (1, 9, 4), (2, 5)]
    assert semidefinite_paths(G, dec, 0, 1, max_len=2) == [(1, 9, 4), (2, 5)]
    with pytest.raises(EnumerationLimitError):
        semidefinite_paths(G, dec, 0, 1, max_paths=2)
    with pytest.raises(ValueError):
        semidefinite_paths(G, dec, 0, 0)


def test_g2_decomposition():
    G = g2()
    dec = decompose_continents(G)
    assert dec.continents == (frozenset({1, 2, 3}), frozenset({4, 5, 6}))
    assert dec.islands == {7}
    assert semidefinite_paths(G, dec, 0, 1) == [(1, 7, 4)]
    assert is_connected(G)


def test_internal_gauge_consistency_detects_negative_cycle():
    tri = [(1, 2, A_DEF), (2, 3, A_DEF), (1, 3, -A_DEF)]
    G = MatrixGraph.from_edges(3, 4, tri)
    assert not internal_gauge_consistency(G, {1, 2, 3})
    assert internal_gauge_consistency(g1(), {1, 2, 3})


def test_g1_unique_nbs():
    (rec,) = find_all_nbs(g1())
    assert rec.sorted_edges() == [(1, 3), (1, 9), (4, 6)]
    assert rec.partition.v2 == {2, 4, 5}
    assert rec.null_space.same_as(Subspace.span(np.array([[0, 0, 1, 1]], float).T))


def test_g2_unique_nbs():
    (rec,) = find_all_nbs(g2())
    assert rec.sorted_edges() == [(2, 3), (5, 6)]
    assert rec.partition.v2 == {6}


def test_g4_unique_nbs():
    (rec,) = find_all_nbs(g4())
    assert rec.sorted_edges() == [(1, 3), (1, 7), (4, 6)]


def test_balanced_graph_has_empty_nbs_with_full_space():
    G = MatrixGraph.from_edges(3, 2, [(1, 2, np.eye(2)), (2, 3, -np.eye(2))])
    (rec,) = find_all_nbs(G)
    assert rec.negation_edges == frozenset() and rec.null_space.dim == 2
    assert is_structurally_balanced(G, rec.partition)


def test_partition_cap():
    with pytest.raises(EnumerationLimitError):
        find_all_nbs(g1(), max_nodes=8)


def test_inconsistent_edges_of_fixture_partition():
    p = Bipartition(9, frozenset({2, 4, 5}))
    assert inconsistent_edges(g1(), p) == {(1, 3), (1, 9), (4, 6)}


def brute_force_nbs(G):
    """Independent search: null of stacked |A_e| over inconsistent edges."""
    table = G.edge_table()
    out = []
    for signs in itertools.product([1, -1], repeat=G.n_nodes - 1):
        s = (1,) + signs
        bad = [k for k, e in table.items() if e.sign != s[k[0] - 1] * s[k[1] - 1]]
        if bad:
            M = np.vstack([table[k].magnitude for k in bad])
            sv = np.linalg.svd(M, compute_uv=False)
            null_dim = G.block_dim - int(np.sum(sv > 1e-9 * max(1.0, sv[0])))
        else:
            null_dim = G.block_dim
        if null_dim > 0:
            out.append((frozenset(i for i, x in enumerate(s, 1) if x < 0), frozenset(bad), null_dim))
    return sorted(out, key=lambda r: sorted(r[0]))


@settings(max_examples=60, deadline=None, derandomize=True)
@given(st.integers(0, 2 ** 32 - 1), st.booleans())
def test_nbs_search_matches_brute_force(seed, pn_tree):
    rng = np.random.default_rng(seed)
    G = random_pn_tree_graph(rng, n_max=7) if pn_tree else random_mixed_graph(rng, n_max=7)
    ours = sorted(((r.partition.v2, r.negation_edges, r.null_space.dim) for r in find_all_nbs(G)),
                  key=lambda r: sorted(r[0]))
    assert ours == brute_force_nbs(G)


def brute_force_paths(G, dec, kl, km):
    """nx.all_simple_paths on the semidefinite subgraph, filtered to island interiors."""
    table = G.edge_table()
    S = nx.Graph()
    S.add_nodes_from(G.nodes)
    S.add_edges_from(k for k, e in table.items() if not e.definite)
    out = set()
    for a in dec.continents[kl]:
        for b in dec.continents[km]:
            for p in nx.all_simple_paths(S, a, b):
                if all(x in dec.islands for x in p[1:-1]):
                    out.add(tuple(p))
    return sorted(out)


@settings(max_examples=60, deadline=None, derandomize=True)
@given(st.integers(0, 2 ** 32 - 1))
def test_path_enumeration_matches_networkx(seed):
    G = random_mixed_graph(np.random.default_rng(seed), n_max=8, d_max=3, p_extra=0.4)
    dec = decompose_continents(G)
    for kl, km in itertools.combinations(range(len(dec.continents)), 2):
        assert semidefinite_paths(G, dec, kl, km) == brute_force_paths(G, dec, kl, km)


@settings(max_examples=40, deadline=None, derandomize=True)
@given(st.integers(0, 2 ** 32 - 1))
def test_decomposition_partitions_nodes(seed):
    G = random_mixed_graph(np.random.default_rng(seed))
    dec = decompose_continents(G)
    nodes = set(dec.islands)
    for K in dec.continents:
        assert not nodes & K
        nodes |= K
        assert nx.is_connected(underlying_graph(G, definite_only=True).subgraph(K))
    assert nodes == set(G.nodes)


def test_semidefinite_edge_inside_a_continent_is_not_a_path():
    # the chord (1,3) is semidefinite but both ends lie in the same continent
    G = MatrixGraph.from_edges(4, 4, [(1, 2, A_DEF), (2, 3, A_DEF), (1, 3, A1), (3, 4, A1)])
    dec = decompose_continents(G)
    assert dec.continents == (frozenset({1, 2, 3}),) and dec.islands == {4}
