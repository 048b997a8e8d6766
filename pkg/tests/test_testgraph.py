from collections import Counter
from itertools import combinations
from math import comb

import numpy as np
import pytest

from dptest.core import Domain
from dptest.errors import EmptyLocalView, InvalidArgument, InvalidGraph, UnsupportedSize
from dptest.testgraph import (build_clique_slice, build_family, build_from_edges,
                              build_johnson, build_sliding_window, local_subgraph,
                              require_positive_degrees, sample_edge, sample_edges,
                              sliding_window_domain)


def _brute_johnson_edges(n, k, t):
    sets = list(combinations(range(1, n + 1), k))
    return {(a, b) for a, S in enumerate(sets) for b, T in enumerate(sets)
            if len(set(S) & set(T)) == t}


class TestJohnson:
    def test_j421(self):
        dom, g = build_johnson(4, 2, 1)
        assert g.num_vertices == 6
        assert set(g.degree_array) == {4}

    def test_vertex_count(self):
        _, g = build_johnson(6, 3, 1)
        assert g.num_vertices == 20

    @pytest.mark.parametrize("n,k,t", [(5, 2, 0), (6, 3, 1), (7, 3, 2), (6, 2, 1), (8, 4, 0)])
    def test_matches_brute_force(self, n, k, t):
        _, g = build_johnson(n, k, t)
        edges = {(s, u) for s, u, _ in g.edge_list()}
        edges |= {(u, s) for s, u in edges}
        assert edges == _brute_johnson_edges(n, k, t)
        assert g.nnz == comb(n, k) * comb(k, t) * comb(n - k, k - t)

    def test_j_n21_local_clique_without_loops(self):
        _, g = build_johnson(7, 2, 1)
        for i in (1, 4, 7):
            local = local_subgraph(g, i)
            m = local.num_vertices
            assert m == 6
            dense = local.to_scipy().toarray()
            assert np.array_equal(dense, np.ones((m, m)) - np.eye(m))

    def test_bad_parameters(self):
        with pytest.raises(InvalidArgument):
            build_johnson(5, 3, 3)

    def test_size_cap(self):
        with pytest.raises(UnsupportedSize):
            build_johnson(40, 20, 10)


class TestSlidingWindow:
    def test_windows_wrap(self):
        dom = sliding_window_domain(6, 3)
        assert dom.sets[0] == (1, 2, 3)
        assert dom.sets[5] == (1, 2, 6)

    def test_degree_and_count(self):
        _, g = build_sliding_window(6, 3)
        assert g.num_vertices == 6
        assert set(g.degree_array) == {5}

    def test_sparse(self):
        dom = sliding_window_domain(8, 4, sparse=True)
        assert dom.sets == ((1, 2, 3, 4), (3, 4, 5, 6), (5, 6, 7, 8), (1, 2, 7, 8))

    def test_sparse_divisibility(self):
        with pytest.raises(InvalidArgument):
            sliding_window_domain(9, 4, sparse=True)

    @pytest.mark.parametrize("n,k", [(8, 2), (12, 3), (10, 5)])
    def test_k_of_2k_minus_1_neighbours_retain(self, n, k):
        dom, g = build_sliding_window(n, k)
        assert set(g.degree_array) == {2 * k - 1}
        for s, S in enumerate(dom.sets):
            nbrs, _ = g.row(s)
            for i in S:
                assert sum(i in dom.sets[u] for u in nbrs) == k

    def test_local_view_is_clique_with_loops(self):
        _, g = build_sliding_window(6, 3)
        local = local_subgraph(g, 2)
        assert local.num_vertices == 3
        assert np.array_equal(local.to_scipy().toarray(), np.ones((3, 3)))
        assert list(local.parent) == [0, 1, 5]


class TestCliqueSlice:
    def test_n4(self):
        _, g = build_clique_slice(4)
        assert g.num_vertices == 6
        assert np.array_equal(g.to_scipy().toarray(), np.ones((6, 6)))

    def test_odd(self):
        with pytest.raises(InvalidArgument):
            build_clique_slice(5)

    def test_local(self):
        _, g = build_clique_slice(6)
        assert local_subgraph(g, 3).num_vertices == comb(5, 2)


class TestFromEdges:
    def test_empty_graph_refused_by_sampler(self):
        g = build_from_edges(Domain(2, ((1,), (2,))), [])
        with pytest.raises(InvalidGraph):
            require_positive_degrees(g)

    def test_duplicates_sum_and_mirror(self):
        g = build_from_edges(Domain(2, ((1,), (2,), (1, 2))), [(0, 1), (0, 1, 2), (2, 2)])
        assert g.weight(0, 1) == 3 and g.weight(1, 0) == 3
        assert g.weight(2, 2) == 1
        assert list(g.degree_array) == [3, 3, 1]

    def test_out_of_range(self):
        with pytest.raises(InvalidArgument):
            build_from_edges(Domain(2, ((1,),)), [(0, 3)])

    def test_nonpositive_weight(self):
        with pytest.raises(InvalidArgument):
            build_from_edges(Domain(2, ((1,), (2,))), [(0, 1, 0)])


class TestSampling:
    def test_single_edge(self):
        g = build_from_edges(Domain(2, ((1,), (2,))), [(0, 1)])
        rng = np.random.default_rng(0)
        for _ in range(20):
            assert sample_edge(g, rng) in {(0, 1), (1, 0)}

    def test_sliding_n4_uniform_over_twelve_picks(self):
        _, g = build_sliding_window(4, 2)
        src, dst = sample_edges(g, np.random.default_rng(5), 120_000)
        counts = Counter(zip(src.tolist(), dst.tolist()))
        assert len(counts) == 12
        freqs = np.array(list(counts.values())) / 120_000
        assert np.all(np.abs(freqs - 1 / 12) < 0.005)

    def test_weighted_neighbour_choice(self):
        g = build_from_edges(Domain(1, ((1,), (1,), (1,))), [(0, 1, 3), (0, 2, 1)])
        src, dst = sample_edges(g, np.random.default_rng(1), 40_000)
        from0 = dst[src == 0]
        assert abs(np.mean(from0 == 1) - 0.75) < 0.02

    def test_deterministic(self):
        _, g = build_johnson(6, 3, 1)
        a = sample_edges(g, np.random.default_rng(9), 50)
        b = sample_edges(g, np.random.default_rng(9), 50)
        assert all(np.array_equal(x, y) for x, y in zip(a, b))


def test_empty_local_view():
    _, g = build_johnson(5, 2, 1)
    g2 = build_from_edges(Domain(6, g.dom.sets), g.edge_list())
    with pytest.raises(EmptyLocalView):
        local_subgraph(g2, 6)


@pytest.mark.parametrize("family,n,k,t", [("johnson", 6, 3, 1), ("sliding", 8, 3, None),
                                          ("sliding-sparse", 8, 4, None),
                                          ("clique-slice", 6, None, None),
                                          ("j-2-1", 6, None, None)])
def test_named_constructions_are_regular(family, n, k, t):
    _, g = build_family(family, n, k, t)
    assert g.is_regular()
    dense = g.to_scipy().toarray()
    assert np.array_equal(dense, dense.T)
