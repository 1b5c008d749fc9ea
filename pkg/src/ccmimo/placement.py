"""Cache placement for the two baseline families."""
from __future__ import annotations

from itertools import combinations

from .model import CachePlacement, CyclicPacket, SubpacketId, SubsetPacket

__all__ = ["cyclic_placement", "subset_placement", "is_cached", "cachers_of"]


def cyclic_placement(K: int, t: int) -> CachePlacement:
    """Split each file into ``K`` packets; user ``k`` caches the cyclic
    window ``k, k+1, ..., k+t-1`` (mod K)."""
    if not 1 <= t <= K:
        raise ValueError(f"need 1 <= t <= K, got t={t}, K={K}")
    packets = [CyclicPacket(p) for p in range(1, K + 1)]
    cache = [
        frozenset(CyclicPacket((k - 1 + j) % K + 1) for j in range(t))
        for k in range(1, K + 1)
    ]
    return CachePlacement("cyclic", tuple(packets), tuple(cache))


def subset_placement(K: int, t: int) -> CachePlacement:
    """Split each file into ``C(K, t)`` packets labelled by ``t``-subsets;
    user ``k`` caches every packet whose label contains ``k``."""
    if not 1 <= t <= K:
        raise ValueError(f"need 1 <= t <= K, got t={t}, K={K}")
    packets = [SubsetPacket(T) for T in combinations(range(1, K + 1), t)]
    cache = [frozenset(p for p in packets if k in p.members) for k in range(1, K + 1)]
    return CachePlacement("subset", tuple(packets), tuple(cache))


def is_cached(placement: CachePlacement, user: int, subpacket: SubpacketId) -> bool:
    # membership is per packet; q and g never matter
    return subpacket.packet in placement.cache_of(user)


def cachers_of(placement: CachePlacement, packet) -> frozenset[int]:
    return frozenset(
        k for k in range(1, placement.K + 1) if packet in placement.cache_of(k)
    )
