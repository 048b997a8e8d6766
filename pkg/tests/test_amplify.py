from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dptest.amplify import (SimpleGraph, amplification_ratio, boundary_domain, cycle_graph,
                            random_regular_graph, vertex_expansion)
from dptest.errors import InvalidArgument, UnsupportedSize
from dptest.testgraph import sliding_window_domain


def _h_oracle(graph):
    d = graph.regular_degree()
    nbrs = graph.neighbors
    best = None
    for size in range(1, graph.n // d + 1):
        for S in combinations(range(graph.n), size):
            boundary = set().union(*(nbrs[v] for v in S)) - set(S)
            value = Fraction(len(boundary), size * d)
            best = value if best is None else min(best, value)
    return best


class TestRandomRegular:
    def test_k4(self):
        g = random_regular_graph(4, 3, 0)
        assert len(g.edges) == 6

    def test_two_regular(self):
        g = random_regular_graph(6, 2, 3)
        assert set(g.degrees()) == {2}

    def test_odd_product(self):
        with pytest.raises(InvalidArgument):
            random_regular_graph(5, 3, 0)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(4, 16), st.integers(1, 4), st.integers(0, 2**31))
    def test_degree_audit(self, n, d, seed):
        if (n * d) % 2 or d >= n:
            return
        g = random_regular_graph(n, d, seed)
        assert set(g.degrees()) == {d}
        assert g == random_regular_graph(n, d, seed)

    def test_parallel_edge_refused(self):
        with pytest.raises(InvalidArgument):
            SimpleGraph.from_edges(3, [(0, 1), (1, 0)])


class TestExpansion:
    def test_c6(self):
        est = vertex_expansion(cycle_graph(6))
        assert est.h == Fraction(1, 3)
        assert len(est.witness) == 3

    def test_k4(self):
        k4 = SimpleGraph.from_edges(4, combinations(range(4), 2))
        assert vertex_expansion(k4).h == 1

    def test_c4(self):
        assert vertex_expansion(cycle_graph(4)).h == Fraction(1, 2)

    @pytest.mark.parametrize("seed", range(4))
    def test_matches_oracle(self, seed):
        g = random_regular_graph(10, 3, seed)
        assert vertex_expansion(g).h == _h_oracle(g)

    def test_sampled_is_upper_bound(self):
        g = random_regular_graph(12, 3, 5)
        exact = vertex_expansion(g).h
        sampled = vertex_expansion(g, "sampled", samples=200, seed=1)
        assert sampled.mode == "sampled"
        assert sampled.h >= exact

    def test_cap(self):
        with pytest.raises(UnsupportedSize):
            vertex_expansion(cycle_graph(40))

    def test_folklore_statistic(self):
        hs = [vertex_expansion(random_regular_graph(14, 3, s)).h for s in range(20)]
        assert float(np.median([float(h) for h in hs])) > 0.1


class TestBoundaryDomain:
    def test_c4(self):
        dom = boundary_domain(cycle_graph(4))
        assert dom.sets == ((2, 4), (1, 3), (2, 4), (1, 3))

    def test_k4(self):
        k4 = SimpleGraph.from_edges(4, combinations(range(4), 2))
        dom = boundary_domain(k4)
        assert all(set(S) == set(range(1, 5)) - {v + 1} for v, S in enumerate(dom.sets))

    def test_non_regular(self):
        with pytest.raises(InvalidArgument):
            boundary_domain(SimpleGraph.from_edges(3, [(0, 1)]))


class TestRatio:
    def test_c4(self):
        dom = boundary_domain(cycle_graph(4))
        res = amplification_ratio(dom, [1, 0, 0, 0], [0, 0, 0, 0])
        assert (res.encoded_distance, res.delta, res.k, res.ratio) == (
            Fraction(1, 2), Fraction(1, 4), 2, 1)

    def test_sliding_window_no_amplification(self):
        dom = sliding_window_domain(12, 3)
        x = np.zeros(12, dtype=int)
        y = x.copy()
        y[5] = 1
        res = amplification_ratio(dom, x, y)
        assert res.encoded_distance == Fraction(3, 12)
        assert res.ratio == 1

    def test_equal_strings(self):
        dom = boundary_domain(cycle_graph(4))
        with pytest.raises(InvalidArgument):
            amplification_ratio(dom, [1, 0, 0, 0], [1, 0, 0, 0])

    def test_out_of_regime_warns(self):
        dom = boundary_domain(cycle_graph(4))
        with pytest.warns(UserWarning):
            res = amplification_ratio(dom, [1, 1, 0, 0], [0, 0, 0, 0])
        assert not res.in_regime
