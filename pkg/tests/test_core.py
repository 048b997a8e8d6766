from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dptest.adversary import per_set_single_flip
from dptest.codec import majority_decode
from dptest.core import (DPTable, Domain, as_bits, canonical_subset, closest_codeword,
                         dp_distance, dp_encode, to_fraction)
from dptest.errors import InvalidArgument, UnsupportedSize
from dptest.testgraph import build_sliding_window, k_subsets_domain


@st.composite
def domains(draw, max_n=8, max_sets=8):
    n = draw(st.integers(1, max_n))
    sets = draw(st.lists(st.sets(st.integers(1, n), min_size=1), min_size=1,
                         max_size=max_sets))
    return Domain(n, tuple(tuple(s) for s in sets))


@st.composite
def tables(draw, dom=None):
    dom = dom if dom is not None else draw(domains())
    values = [tuple(draw(st.lists(st.integers(0, 1), min_size=len(s), max_size=len(s))))
              for s in dom.sets]
    return DPTable.from_values(dom, values)


class TestDomain:
    def test_sets_are_canonicalised(self):
        dom = Domain(4, ((3, 1), (2,)))
        assert dom.sets == ((1, 3), (2,))

    def test_duplicates_kept(self):
        dom = Domain(4, ((2, 4), (1, 3), (2, 4), (1, 3)))
        assert len(dom) == 4
        assert list(dom.containing(2)) == [0, 2]

    def test_out_of_range_rejected(self):
        with pytest.raises(InvalidArgument):
            Domain(3, ((1, 4),))

    def test_repeated_coordinate_rejected(self):
        with pytest.raises(InvalidArgument):
            canonical_subset([1, 1], 3)

    @given(domains())
    def test_coord_index_consistent(self, dom):
        for i in range(1, dom.n + 1):
            expected = [s for s, S in enumerate(dom.sets) if i in S]
            assert list(dom.containing(i)) == expected

    def test_digest_stable(self):
        a = Domain(4, ((1, 2), (3, 4)))
        b = Domain(4, ((2, 1), (4, 3)))
        assert a.digest() == b.digest()
        assert a.digest() != Domain(4, ((1, 2), (2, 4))).digest()


class TestEncode:
    def test_projection(self):
        dom = Domain(4, ((1, 3),))
        assert dp_encode([1, 0, 1, 0], dom).local(0) == (1, 1)

    def test_zero_string(self):
        dom = k_subsets_domain(5, 2)
        assert all(v == (0, 0) for v in dp_encode([0] * 5, dom).values)

    def test_length_mismatch(self):
        with pytest.raises(InvalidArgument):
            dp_encode([1, 0], Domain(3, ((1,),)))

    def test_non_binary(self):
        with pytest.raises(InvalidArgument):
            as_bits([0, 2, 1])

    @given(st.data())
    def test_round_trip(self, data):
        dom = data.draw(domains())
        a = data.draw(st.lists(st.integers(0, 1), min_size=dom.n, max_size=dom.n))
        F = dp_encode(a, dom)
        for s, S in enumerate(dom.sets):
            assert F.local(s) == tuple(a[i - 1] for i in S)


class TestDistance:
    def test_zero_on_equal(self):
        _, g = build_sliding_window(6, 3)
        F = dp_encode([1, 0, 1, 1, 0, 0], g.dom)
        assert dp_distance(F, F) == 0

    def test_one_of_four(self):
        dom = Domain(4, ((1, 2), (2, 3), (3, 4), (4, 1)))
        F = dp_encode([0] * 4, dom)
        G = DPTable.from_values(dom, [(1, 0), (0, 0), (0, 0), (0, 0)])
        assert dp_distance(F, G) == Fraction(1, 4)

    def test_single_flip_is_distance_one(self):
        dom = k_subsets_domain(6, 3)
        a = [1, 1, 0, 0, 1, 0]
        assert dp_distance(per_set_single_flip(a, dom, 4), dp_encode(a, dom)) == 1

    def test_domain_mismatch(self):
        F = dp_encode([0, 0], Domain(2, ((1,),)))
        G = dp_encode([0, 0], Domain(2, ((2,),)))
        with pytest.raises(InvalidArgument):
            dp_distance(F, G)

    @settings(max_examples=60)
    @given(st.data())
    def test_pseudometric(self, data):
        dom = data.draw(domains())
        F, G, H = (data.draw(tables(dom)) for _ in range(3))
        assert dp_distance(F, G) == dp_distance(G, F)
        assert dp_distance(F, H) <= dp_distance(F, G) + dp_distance(G, H)
        assert 0 <= dp_distance(F, G) <= 1


class TestClosestCodeword:
    def test_triangle_example(self):
        dom = Domain(3, ((1, 2), (1, 3), (2, 3)))
        F = DPTable.from_values(dom, [(1, 0), (1, 1), (1, 1)])
        a, dist = closest_codeword(F)
        assert list(a) == [1, 0, 1]
        assert dist == Fraction(1, 3)

    def test_codeword_is_fixed(self):
        dom = k_subsets_domain(6, 3)
        a = [0, 1, 1, 0, 1, 0]
        found, dist = closest_codeword(dp_encode(a, dom))
        assert list(found) == a and dist == 0

    def test_too_large(self):
        dom = Domain(25, ((1,),))
        with pytest.raises(UnsupportedSize):
            closest_codeword(dp_encode([0] * 25, dom))

    def test_matches_decoder_on_single_flip(self):
        dom = k_subsets_domain(6, 3)
        F = per_set_single_flip([1, 0, 1, 0, 1, 1], dom, 11)
        _, decoded = majority_decode(F)
        _, dist = closest_codeword(F)
        assert dist <= dp_distance(F, decoded)

    @settings(max_examples=60)
    @given(tables())
    def test_never_worse_than_decoder(self, F):
        _, decoded = majority_decode(F)
        _, dist = closest_codeword(F)
        assert dist <= dp_distance(F, decoded)
        # brute force agrees with a direct check of its own answer
        a, _ = closest_codeword(F)
        assert dp_distance(F, dp_encode(a, F.domain)) == dist


def test_to_fraction_reads_decimal_floats():
    assert to_fraction(0.1) == Fraction(1, 10)
    assert to_fraction("3/40") == Fraction(3, 40)
    assert to_fraction(np.int64(2)) == 2
