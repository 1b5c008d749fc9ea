"""Complex-baseband link-level simulation of signal-level schemes.

Channels are i.i.d. unit-variance circularly-symmetric complex Gaussian.
Every term gets a unit-norm zero-forcing beamformer computed from the
nullspace of the equivalent channels in its zero-forcing set; receivers
know the scalar multipliers ``h^H w`` exactly and cancel cached terms
before dividing by the desired term's multiplier.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    ChannelMismatch,
    DegenerateZfSet,
    InputError,
    NotStrictMode,
    NotVerified,
    RankDeficient,
)
from .model import DeliveryScheme, NetworkConfig, StreamId, SubpacketId
from .placement import is_cached
from .verify import check_scheme

__all__ = [
    "ChannelRealization",
    "StreamRecord",
    "SimulationReport",
    "sample_channels",
    "pick_combiners",
    "zf_beamformer",
    "design_beamformers",
    "simulate",
    "zf_residual",
    "RANK_TOL",
    "ZF_TOL",
    "RECOVERY_TOL",
]

RANK_TOL = 1e-9
ZF_TOL = 1e-10
RECOVERY_TOL = 1e-8

COMBINER_POLICIES = ("identity", "svd")


def _rank(A: np.ndarray, tol: float = RANK_TOL) -> int:
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


@dataclass(frozen=True)
class ChannelRealization:
    """``H[k]`` is user ``k+1``'s ``G x L`` channel, ``U[k]`` its ``G x G``
    combiner and ``h[k, g]`` the equivalent channel ``H_k^H u_{k,g}``."""

    H: np.ndarray
    U: np.ndarray
    h: np.ndarray
    seed: Optional[int] = None
    combiner_policy: str = "identity"

    @property
    def K(self) -> int:
        return self.H.shape[0]

    def equivalent(self, stream: StreamId) -> np.ndarray:
        return self.h[stream.user - 1, stream.stream - 1]


def pick_combiners(Hk: np.ndarray, policy: str = "identity") -> np.ndarray:
    """Receive combiner matrix whose columns are the unit-norm ``u_{k,g}``."""
    G = Hk.shape[0]
    if policy == "identity":
        return np.eye(G, dtype=complex)
    if policy == "svd":
        U, _, _ = np.linalg.svd(Hk)
        return U
    raise InputError(f"unknown combiner policy {policy!r}; use one of {COMBINER_POLICIES}")


def _equivalent_channels(H: np.ndarray, U: np.ndarray) -> np.ndarray:
    # h[k, g] = (u_{k,g}^H H_k)^H = H_k^H u_{k,g}
    return np.einsum("kal,kag->kgl", H.conj(), U)


def channel_from_matrices(H: np.ndarray, combiner_policy: str = "identity",
                          seed: Optional[int] = None) -> ChannelRealization:
    H = np.asarray(H, dtype=complex)
    U = np.stack([pick_combiners(Hk, combiner_policy) for Hk in H])
    return ChannelRealization(H, U, _equivalent_channels(H, U), seed, combiner_policy)


def sample_channels(config: NetworkConfig, seed: int,
                    combiner_policy: str = "identity") -> ChannelRealization:
    rng = np.random.default_rng(seed)
    K, G, L = config.K, config.G, config.L
    for _ in range(10):
        H = (rng.standard_normal((K, G, L)) + 1j * rng.standard_normal((K, G, L))) / np.sqrt(2)
        if all(_rank(Hk) == G for Hk in H) and _rank(H.reshape(K * G, L)) >= L:
            return channel_from_matrices(H, combiner_policy, seed)
    raise RankDeficient(f"no full-rank channel after 10 draws (seed {seed})")


def zf_beamformer(zf_channels: Sequence[np.ndarray], target: np.ndarray) -> np.ndarray:
    """Unit-norm ``w`` with ``h^H w = 0`` for every ``h`` in ``zf_channels``
    and ``target^H w`` real positive.

    Among the nullspace directions the projection of ``target`` is taken,
    which maximises ``|target^H w|``.
    """
    target = np.asarray(target, dtype=complex)
    L = target.shape[0]
    if len(zf_channels):
        A = np.conj(np.asarray(zf_channels, dtype=complex)).reshape(len(zf_channels), L)
        _, s, Vh = np.linalg.svd(A)
        rank = int(np.sum(s > RANK_TOL * s[0])) if s[0] > 0 else 0
        if rank < A.shape[0]:
            raise DegenerateZfSet(
                f"zero-forcing channels have rank {rank} < {A.shape[0]}")
        basis = Vh[rank:].conj().T
    else:
        basis = np.eye(L, dtype=complex)
    coeff = basis.conj().T @ target
    gain = np.linalg.norm(coeff)
    if gain <= RANK_TOL * np.linalg.norm(target):
        raise DegenerateZfSet("target lies in the span of the zero-forcing channels")
    return basis @ coeff / gain


def design_beamformers(scheme: DeliveryScheme, channel: ChannelRealization) -> list:
    """One ``L x n_terms`` beamformer matrix per transmission, columns in
    term order."""
    out = []
    for tx in scheme.transmissions:
        cols = []
        for term in tx.terms:
            zf = [channel.equivalent(s) for s in sorted(term.zf_set)]
            cols.append(zf_beamformer(zf, channel.equivalent(term.recipient)))
        out.append(np.stack(cols, axis=1))
    return out


def zf_residual(tx, W: np.ndarray, channel: ChannelRealization) -> float:
    """Largest ``|h^H w| / ||h||`` over every term and zero-forced stream."""
    worst = 0.0
    for j, term in enumerate(tx.terms):
        for s in term.zf_set:
            h = channel.equivalent(s)
            worst = max(worst, abs(h.conj() @ W[:, j]) / np.linalg.norm(h))
    return worst


@dataclass(frozen=True)
class StreamRecord:
    transmission: int
    stream: StreamId
    subpacket: SubpacketId
    sent: complex
    recovered: complex
    error: float
    gain: complex


@dataclass
class SimulationReport:
    seed: int
    noise_variance: float
    cache_cancellation: bool
    combiner_policy: str
    records: list = field(default_factory=list)
    per_transmission_streams: list = field(default_factory=list)
    zf_residual_max: float = 0.0
    cancellation_residual_max: float = 0.0

    @property
    def errors(self) -> np.ndarray:
        return np.array([r.error for r in self.records])

    @property
    def max_error(self) -> float:
        return float(self.errors.max()) if self.records else 0.0

    @property
    def mse(self) -> float:
        return float(np.mean(self.errors ** 2)) if self.records else 0.0

    @property
    def expected_mse(self) -> float:
        if not self.records:
            return 0.0
        gains = np.array([abs(r.gain) for r in self.records])
        return float(np.mean(self.noise_variance / gains ** 2))

    def summary(self) -> dict:
        return {
            "seed": self.seed,
            "noise_variance": self.noise_variance,
            "cache_cancellation": self.cache_cancellation,
            "combiner_policy": self.combiner_policy,
            "max_error": self.max_error,
            "mse": self.mse,
            "expected_mse": self.expected_mse,
            "zf_residual_max": self.zf_residual_max,
            "cancellation_residual_max": self.cancellation_residual_max,
            "per_transmission_streams": list(self.per_transmission_streams),
        }

    def to_dict(self) -> dict:
        out = self.summary()
        out["records"] = [
            {
                "transmission": r.transmission,
                "stream": str(r.stream),
                "subpacket": str(r.subpacket),
                "sent": [r.sent.real, r.sent.imag],
                "recovered": [r.recovered.real, r.recovered.imag],
                "error": r.error,
            }
            for r in self.records
        ]
        return out


class _ReceiverCache:
    """Symbol lookup restricted to what a user has cached."""

    def __init__(self, scheme, user, symbols):
        self._placement = scheme.placement
        self._user = user
        self._symbols = symbols

    def has(self, subpacket) -> bool:
        return is_cached(self._placement, self._user, subpacket)

    def symbol(self, subpacket) -> complex:
        if not self.has(subpacket):
            raise KeyError(f"user {self._user} does not cache {subpacket}")
        return self._symbols[subpacket]


def simulate(scheme: DeliveryScheme, channel: ChannelRealization,
             noise_variance: float = 0.0, seed: int = 0, *,
             cache_cancellation: bool = True, beamformers=None,
             check: bool = True) -> SimulationReport:
    """Transmit every vector of a strict signal-level scheme over
    ``channel`` and decode every served stream.

    Symbols and noise for transmission ``i`` come from a generator seeded
    by ``(seed, i)``; noise is drawn at unit variance and scaled, so runs
    that differ only in ``noise_variance`` share their random draws.
    """
    if scheme.flavor == "miso-bit" or scheme.mac_mode:
        raise NotStrictMode("symbol-level simulation needs a strict signal-level scheme")
    cfg = scheme.config
    if channel.H.shape != (cfg.K, cfg.G, cfg.L):
        raise ChannelMismatch(
            f"channel shape {channel.H.shape} does not match (K, G, L) = "
            f"{(cfg.K, cfg.G, cfg.L)}")
    if check:
        rep = check_scheme(scheme, "strict")
        if not rep.passed:
            raise NotVerified(f"scheme fails strict verification: {rep.violations[0]}")
    if beamformers is None:
        beamformers = design_beamformers(scheme, channel)
    report = SimulationReport(seed, float(noise_variance), cache_cancellation,
                              channel.combiner_policy)
    sigma = np.sqrt(noise_variance)
    for tx, W in zip(scheme.transmissions, beamformers):
        rng = np.random.default_rng([seed, tx.index])
        X = np.exp(2j * np.pi * rng.random(len(tx.terms)))
        served = sorted(tx.served)
        noise = (rng.standard_normal(len(served)) + 1j * rng.standard_normal(len(served))) / np.sqrt(2)
        x = W @ X
        symbols = {term.subpacket: X[j] for j, term in enumerate(tx.terms)}
        report.per_transmission_streams.append(len(served))
        report.zf_residual_max = max(report.zf_residual_max,
                                     zf_residual(tx, W, channel))
        for n, r in enumerate(served):
            h = channel.equivalent(r)
            mult = h.conj() @ W
            y = h.conj() @ x + sigma * noise[n]
            cache = _ReceiverCache(scheme, r.user, symbols)
            j_des = next(j for j, term in enumerate(tx.terms) if term.recipient == r)
            known = 0j
            truth = 0j
            for j, term in enumerate(tx.terms):
                if j == j_des:
                    continue
                truth += X[j] * mult[j]
                if cache.has(term.subpacket):
                    known += cache.symbol(term.subpacket) * mult[j]
            # zero-forced terms are the only part of the truth the receiver skips
            report.cancellation_residual_max = max(report.cancellation_residual_max,
                                                   abs(known - truth))
            if cache_cancellation:
                y = y - known
            est = y / mult[j_des]
            report.records.append(StreamRecord(
                tx.index, r, tx.terms[j_des].subpacket, complex(X[j_des]), complex(est),
                float(abs(est - X[j_des])), complex(mult[j_des])))
    return report
