from collections import Counter
from fractions import Fraction
from math import comb

from hypothesis import given, strategies as st

from ccmimo.model import CyclicPacket, SubpacketId
from ccmimo.placement import cachers_of, cyclic_placement, is_cached, subset_placement

sizes = st.integers(2, 9).flatmap(lambda K: st.tuples(st.just(K), st.integers(1, K)))


@given(sizes)
def test_cyclic_windows(Kt):
    K, t = Kt
    pl = cyclic_placement(K, t)
    assert pl.n_packets == K
    for k in range(1, K + 1):
        assert pl.cache_of(k) == {CyclicPacket((k - 1 + j) % K + 1) for j in range(t)}
        assert pl.cached_fraction(k) == Fraction(t, K)
    assert all(len(cachers_of(pl, p)) == t for p in pl.packets)


@given(sizes)
def test_subset_membership(Kt):
    K, t = Kt
    pl = subset_placement(K, t)
    assert pl.n_packets == comb(K, t)
    per_user = Counter(k for k in range(1, K + 1) for _ in pl.cache_of(k))
    assert set(per_user.values()) == {comb(K - 1, t - 1)}
    for p in pl.packets:
        assert cachers_of(pl, p) == set(p.members)


def test_cache_lookup_ignores_q_and_g():
    pl = cyclic_placement(6, 1)
    assert is_cached(pl, 2, SubpacketId(5, CyclicPacket(2), 3, 2))
    assert not is_cached(pl, 2, SubpacketId(2, CyclicPacket(3)))
