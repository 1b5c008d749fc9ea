"""Core domain types for cache-aided multi-antenna delivery schemes.

All values are frozen dataclasses. Containers are tuples / frozensets and
terms inside a transmission are kept in canonical (sorted) order, so two
schemes are equal exactly when they are structurally equal.
"""
from __future__ import annotations

import string
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence, Union

from .errors import (
    BadFileIndex,
    ConfigError,
    GExceedsL,
    NonIntegerEta,
    NonIntegerT,
    ServeGroupTooLarge,
    WrongLength,
)

__all__ = [
    "NetworkConfig",
    "validate_config",
    "StreamId",
    "CyclicPacket",
    "SubsetPacket",
    "PacketLabel",
    "SubpacketId",
    "Delivery",
    "Term",
    "TransmissionVector",
    "CachePlacement",
    "DeliveryScheme",
    "FLAVORS",
    "demands_from_list",
    "file_letter",
]

FLAVORS = ("miso-bit", "miso-signal", "mimo-signal")


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**6)
    return Fraction(value)


def _positive_int(name, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"{name} must be a positive integer, got {value!r}")
    return value


@dataclass(frozen=True)
class NetworkConfig:
    """Network parameters.

    ``K`` users, transmitter multiplexing gain ``L``, receiver multiplexing
    gain ``G``, ``N`` library files, per-user cache of ``M`` files and a
    nominal file size ``F`` (bookkeeping only; ``None`` means "one data unit
    per subpacket").
    """

    K: int
    L: int
    G: int
    N: int
    M: Fraction
    F: Optional[int] = None

    def __post_init__(self):
        for name in ("K", "L", "G", "N"):
            _positive_int(name, getattr(self, name))
        M = _as_fraction(self.M)
        object.__setattr__(self, "M", M)
        if M < 0:
            raise ConfigError(f"M must be non-negative, got {M}")
        if self.F is not None:
            _positive_int("F", self.F)
        if self.G > self.L:
            raise GExceedsL(f"G={self.G} exceeds L={self.L}")
        t = self.K * M / self.N
        if t.denominator != 1 or t < 1:
            raise NonIntegerT(f"t = K*M/N = {t} must be a positive integer")
        if self.L % self.G:
            raise NonIntegerEta(f"eta = L/G = {self.L}/{self.G} is not an integer")
        if self.t + self.eta > self.K:
            raise ServeGroupTooLarge(
                f"t + eta = {self.t + self.eta} exceeds K = {self.K}"
            )

    @property
    def t(self) -> int:
        return int(self.K * self.M / self.N)

    @property
    def eta(self) -> int:
        return self.L // self.G

    def with_(self, **changes) -> "NetworkConfig":
        return replace(self, **changes)


def validate_config(K, L, G, N, M, F=None) -> NetworkConfig:
    """Build a :class:`NetworkConfig`, raising a named :class:`ConfigError`
    subclass for the first violated invariant."""
    if isinstance(M, str):
        M = Fraction(M)
    return NetworkConfig(K=K, L=L, G=G, N=N, M=M, F=F)


@dataclass(frozen=True, order=True)
class StreamId:
    """Data stream ``stream`` at ``user``. MISO schemes use ``stream=1``."""

    user: int
    stream: int = 1

    def __str__(self):
        return f"{self.user}:{self.stream}"

    @classmethod
    def parse(cls, text: str) -> "StreamId":
        user, _, stream = str(text).partition(":")
        return cls(int(user), int(stream) if stream else 1)


@dataclass(frozen=True, order=True)
class CyclicPacket:
    index: int

    def owners(self) -> tuple[int, ...]:
        return (self.index,)

    def to_json(self):
        return self.index


@dataclass(frozen=True, order=True)
class SubsetPacket:
    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(self.members)
        if list(members) != sorted(set(members)):
            raise ValueError(f"subset label must be sorted and unique: {members}")
        object.__setattr__(self, "members", members)

    def owners(self) -> tuple[int, ...]:
        return self.members

    def to_json(self):
        return list(self.members)


PacketLabel = Union[CyclicPacket, SubsetPacket]


def _packet_key(packet: PacketLabel):
    if isinstance(packet, CyclicPacket):
        return (0, (packet.index,))
    return (1, packet.members)


def file_letter(index: int) -> str:
    if 1 <= index <= 26:
        return string.ascii_uppercase[index - 1]
    return f"W{index}"


@dataclass(frozen=True)
class SubpacketId:
    """One transmitted data unit: ``file``, packet label, subpacket ``q``
    and stream split ``g`` (``None`` before elevation)."""

    file: int
    packet: PacketLabel
    q: int = 1
    g: Optional[int] = None

    def sort_key(self):
        return (self.file, _packet_key(self.packet), self.q, self.g or 0)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        if isinstance(self.packet, CyclicPacket):
            p = str(self.packet.index)
        else:
            p = "{" + ",".join(map(str, self.packet.members)) + "}"
        sup = str(self.q) if self.g is None else f"{self.q},{self.g}"
        return f"{file_letter(self.file)}_{p}^{{{sup}}}"


@dataclass(frozen=True)
class Delivery:
    """A subpacket addressed to one recipient stream."""

    subpacket: SubpacketId
    recipient: StreamId

    def sort_key(self):
        return (self.recipient, self.subpacket.sort_key())


@dataclass(frozen=True)
class Term:
    """One beamformed payload.

    ``parts`` holds a single :class:`Delivery` for signal-level terms; a
    bit-level XOR codeword holds one delivery per constituent. ``zf_set``
    is the set of streams where the term's beamformer nulls it.
    """

    parts: tuple[Delivery, ...]
    zf_set: frozenset[StreamId]
    xor: bool = False

    def __post_init__(self):
        parts = tuple(sorted(self.parts, key=Delivery.sort_key))
        if not parts:
            raise ValueError("a term needs at least one delivery")
        if not self.xor and len(parts) != 1:
            raise ValueError("plain terms carry exactly one subpacket")
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "zf_set", frozenset(self.zf_set))

    @classmethod
    def plain(cls, subpacket, recipient, zf_set) -> "Term":
        return cls((Delivery(subpacket, recipient),), frozenset(zf_set))

    @classmethod
    def xor_of(cls, deliveries: Iterable[Delivery], zf_set) -> "Term":
        return cls(tuple(deliveries), frozenset(zf_set), xor=True)

    @property
    def subpacket(self) -> SubpacketId:
        return self.parts[0].subpacket

    @property
    def recipient(self) -> StreamId:
        return self.parts[0].recipient

    @property
    def recipients(self) -> tuple[StreamId, ...]:
        return tuple(d.recipient for d in self.parts)

    def sort_key(self):
        return (
            tuple(d.sort_key() for d in self.parts),
            tuple(sorted(self.zf_set)),
        )

    def with_zf(self, zf_set) -> "Term":
        return replace(self, zf_set=frozenset(zf_set))

    def __str__(self):
        zf = ",".join(str(s) for s in sorted(self.zf_set))
        if self.xor:
            body = " xor ".join(f"{d.subpacket}->{d.recipient}" for d in self.parts)
            return f"({body}) w[{zf}]"
        return f"{self.subpacket}->{self.recipient} w[{zf}]"


@dataclass(frozen=True)
class TransmissionVector:
    index: int
    terms: tuple[Term, ...]
    duration: Fraction

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(sorted(self.terms, key=Term.sort_key)))
        object.__setattr__(self, "duration", _as_fraction(self.duration))
        if not self.terms:
            raise ValueError(f"transmission {self.index} has no terms")

    def deliveries(self) -> Iterator[Delivery]:
        for term in self.terms:
            yield from term.parts

    @property
    def served(self) -> frozenset[StreamId]:
        return frozenset(d.recipient for d in self.deliveries())

    @property
    def served_users(self) -> frozenset[int]:
        return frozenset(s.user for s in self.served)


@dataclass(frozen=True)
class CachePlacement:
    """File-symmetric placement: ``cache[k-1]`` is the set of packet labels
    user ``k`` stores, for every file in the library."""

    kind: str
    packets: tuple[PacketLabel, ...]
    cache: tuple[frozenset, ...]

    def __post_init__(self):
        if self.kind not in ("cyclic", "subset"):
            raise ValueError(f"unknown placement kind {self.kind!r}")
        object.__setattr__(self, "packets", tuple(sorted(self.packets, key=_packet_key)))
        object.__setattr__(self, "cache", tuple(frozenset(c) for c in self.cache))

    @property
    def n_packets(self) -> int:
        return len(self.packets)

    @property
    def K(self) -> int:
        return len(self.cache)

    def cache_of(self, user: int) -> frozenset:
        return self.cache[user - 1]

    def cached_fraction(self, user: int) -> Fraction:
        return Fraction(len(self.cache_of(user)), self.n_packets)


@dataclass(frozen=True)
class DeliveryScheme:
    config: NetworkConfig
    flavor: str
    placement: CachePlacement
    subpackets_per_file: int
    transmissions: tuple[TransmissionVector, ...]
    demands: tuple[int, ...]
    mac_mode: bool = False

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {self.flavor!r}")
        object.__setattr__(self, "transmissions", tuple(self.transmissions))
        object.__setattr__(self, "demands", tuple(self.demands))
        if len(self.demands) != self.config.K:
            raise WrongLength(f"{len(self.demands)} demands for K={self.config.K}")
        if self.placement.K != self.config.K:
            raise ValueError("placement user count does not match config")
        if self.subpackets_per_file % (self.placement.n_packets * self.g_range):
            raise ValueError(
                "subpackets_per_file is not a multiple of packets x stream splits"
            )

    @property
    def is_mimo(self) -> bool:
        return self.flavor == "mimo-signal"

    @property
    def g_range(self) -> int:
        return self.config.G if self.is_mimo else 1

    @property
    def q_range(self) -> int:
        return self.subpackets_per_file // (self.placement.n_packets * self.g_range)

    def demand_of(self, user: int) -> int:
        return self.demands[user - 1]

    def with_transmissions(self, transmissions: Sequence[TransmissionVector]):
        return replace(self, transmissions=tuple(transmissions))


def demands_from_list(files: Sequence, config: NetworkConfig) -> tuple[int, ...]:
    """Map user ``k`` to ``files[k-1]``. Entries are 1-based file indices or
    file letters (``"A"`` is file 1). Repeated requests are allowed."""
    if len(files) != config.K:
        raise WrongLength(f"expected {config.K} demands, got {len(files)}")
    out = []
    for entry in files:
        if isinstance(entry, str) and not entry.strip().isdigit():
            letter = entry.strip().upper()
            if len(letter) != 1 or letter not in string.ascii_uppercase:
                raise BadFileIndex(f"cannot read file label {entry!r}")
            index = string.ascii_uppercase.index(letter) + 1
        else:
            index = int(entry)
        if not 1 <= index <= config.N:
            raise BadFileIndex(f"file index {entry!r} outside [1, {config.N}]")
        out.append(index)
    return tuple(out)


def default_demands(config: NetworkConfig) -> tuple[int, ...]:
    """User ``k`` requests file ``k`` (wrapping when N < K)."""
    return tuple((k - 1) % config.N + 1 for k in range(1, config.K + 1))
