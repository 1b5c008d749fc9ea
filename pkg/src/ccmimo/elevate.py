"""Stretch a virtual single-stream scheme into a multi-stream scheme.

A virtual term for user ``k`` with zero-forcing users ``T`` becomes ``G``
terms, one per receive stream ``(k, g)``. Part ``g`` is zero-forced at
every stream of every user in ``T`` and at the other ``G - 1`` streams of
``k``, which is ``G(eta - 1) + G - 1 = L - 1`` streams in total.
"""
from __future__ import annotations

from dataclasses import replace
from typing import Optional

from .errors import ConfigMismatch, WrongFlavor
from .model import (
    DeliveryScheme,
    NetworkConfig,
    StreamId,
    Term,
    TransmissionVector,
)

__all__ = ["virtual_config", "real_config", "stretch_term", "elevate_scheme"]


def virtual_config(config: NetworkConfig) -> NetworkConfig:
    """Transmitter gain ``eta`` and receiver gain 1; all other parameters kept."""
    return config.with_(L=config.eta, G=1)


def real_config(virtual: NetworkConfig, G: int) -> NetworkConfig:
    if virtual.G != 1:
        raise ConfigMismatch(f"expected a virtual (G=1) config, got G={virtual.G}")
    return virtual.with_(L=virtual.L * G, G=G)


def stretch_term(term: Term, G: int) -> list[Term]:
    if term.xor:
        raise WrongFlavor("only signal-level terms can be stretched")
    k = term.recipient.user
    zf_users = {s.user for s in term.zf_set}
    base = {StreamId(u, g) for u in zf_users for g in range(1, G + 1)}
    out = []
    for g in range(1, G + 1):
        sub = replace(term.subpacket, g=g)
        own = {StreamId(k, h) for h in range(1, G + 1) if h != g}
        out.append(Term.plain(sub, StreamId(k, g), base | own))
    return out


def elevate_scheme(scheme: DeliveryScheme, G: int,
                   config: Optional[NetworkConfig] = None) -> DeliveryScheme:
    """Stretch every transmission of a ``miso-signal`` scheme for receivers
    with ``G`` streams. Placement and transmission order are kept; the
    subpacketization grows by a factor ``G``."""
    if scheme.flavor != "miso-signal":
        raise WrongFlavor(f"elevation expects a miso-signal scheme, got {scheme.flavor}")
    target = real_config(scheme.config, G)
    if config is not None and config != target:
        raise ConfigMismatch(
            f"scheme was built for virtual network {scheme.config}, "
            f"which does not elevate to {config}"
        )
    transmissions = []
    for tx in scheme.transmissions:
        terms = [part for term in tx.terms for part in stretch_term(term, G)]
        transmissions.append(TransmissionVector(tx.index, tuple(terms), tx.duration / G))
    return DeliveryScheme(
        target, "mimo-signal", scheme.placement, scheme.subpackets_per_file * G,
        tuple(transmissions), scheme.demands, scheme.mac_mode,
    )
