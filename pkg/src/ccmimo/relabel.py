"""Subpacket index normalisation.

Subpacket indices ``q`` are nuisance labels: two schemes are equivalent
when they coincide after renumbering ``q`` within each (user, file,
packet) group by order of first appearance.
"""
from __future__ import annotations

from dataclasses import replace

from .model import Delivery, DeliveryScheme, Term, TransmissionVector

__all__ = ["canonical_relabel", "permute_q", "permute_g"]


def _map_deliveries(scheme: DeliveryScheme, fn) -> DeliveryScheme:
    out = []
    for tx in scheme.transmissions:
        terms = []
        for term in tx.terms:
            parts = tuple(fn(d) for d in term.parts)
            terms.append(Term(parts, term.zf_set, term.xor))
        out.append(TransmissionVector(tx.index, tuple(terms), tx.duration))
    return scheme.with_transmissions(out)


def _group(d: Delivery):
    return (d.recipient.user, d.subpacket.file, d.subpacket.packet)


def canonical_relabel(scheme: DeliveryScheme) -> DeliveryScheme:
    mapping = {}
    counters = {}
    for tx in scheme.transmissions:
        for d in tx.deliveries():
            key = _group(d)
            if (key, d.subpacket.q) not in mapping:
                counters[key] = counters.get(key, 0) + 1
                mapping[key, d.subpacket.q] = counters[key]

    def fn(d):
        q = mapping[_group(d), d.subpacket.q]
        return Delivery(replace(d.subpacket, q=q), d.recipient)

    return _map_deliveries(scheme, fn)


def permute_q(scheme: DeliveryScheme, rng) -> DeliveryScheme:
    """Apply an independent random permutation of ``1..q_range`` to every
    (user, file, packet) group."""
    perms = {}
    n = scheme.q_range

    def fn(d):
        key = _group(d)
        if key not in perms:
            perms[key] = [int(x) + 1 for x in rng.permutation(n)]
        return Delivery(replace(d.subpacket, q=perms[key][d.subpacket.q - 1]), d.recipient)

    return _map_deliveries(scheme, fn)


def permute_g(scheme: DeliveryScheme, perm) -> DeliveryScheme:
    """Relabel the stream axis by ``g -> perm[g-1]`` in subpackets,
    recipients and zero-forcing sets alike."""
    if not scheme.is_mimo:
        return scheme

    def stream(s):
        return replace(s, stream=perm[s.stream - 1])

    out = []
    for tx in scheme.transmissions:
        terms = []
        for term in tx.terms:
            parts = tuple(
                Delivery(replace(d.subpacket, g=perm[d.subpacket.g - 1]), stream(d.recipient))
                for d in term.parts
            )
            terms.append(Term(parts, frozenset(stream(s) for s in term.zf_set), term.xor))
        out.append(TransmissionVector(tx.index, tuple(terms), tx.duration))
    return scheme.with_transmissions(out)
