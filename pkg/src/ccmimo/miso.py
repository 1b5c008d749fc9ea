"""Baseline single-antenna-receiver delivery schemes.

:func:`multiserver_bitlevel` sends XOR codewords over subset placement,
one transmission per serve group of size ``t + eta``; :func:`decouple`
turns each codeword into separately beamformed plain terms.

:func:`cyclic_t1_scheduler` is the low-subpacketization signal-level
scheme over cyclic placement for ``t = 1``, with ``K (1 + eta)``
subpackets per file, found by :func:`schedule_search`.

All generators work on the virtual single-stream network, so a config with
``G > 1`` is first reduced to transmitter gain ``eta = L / G``.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb
from typing import Optional, Sequence

from .errors import (
    ConfigMismatch,
    DemandMissing,
    ScheduleNotFound,
    UnsupportedT,
    WrongFlavor,
)
from .model import (
    CyclicPacket,
    Delivery,
    DeliveryScheme,
    NetworkConfig,
    StreamId,
    SubpacketId,
    SubsetPacket,
    Term,
    TransmissionVector,
    default_demands,
)
from .placement import cyclic_placement, subset_placement

__all__ = [
    "DemandState",
    "Schedule",
    "multiserver_bitlevel",
    "decouple",
    "cyclic_t1_scheduler",
    "schedule_search",
    "DEFAULT_NODE_BUDGET",
]

log = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 10**7
# phase-2 candidate lists above this size are not materialised
FALLBACK_CANDIDATE_LIMIT = 200_000


def _virtual(config: NetworkConfig) -> NetworkConfig:
    if config.G == 1:
        return config
    return config.with_(L=config.eta, G=1)


def _check_demands(config, demands):
    if demands is None:
        return default_demands(config)
    demands = tuple(demands)
    if len(demands) != config.K:
        raise DemandMissing(f"need a demand for each of {config.K} users")
    for d in demands:
        if not 1 <= d <= config.N:
            raise DemandMissing(f"demand {d} outside [1, {config.N}]")
    return demands


def multiserver_bitlevel(config: NetworkConfig, demands=None, placement=None) -> DeliveryScheme:
    """Bit-level multiserver scheme on subset placement.

    Every file is split into ``C(K, t)`` subfiles and each subfile into
    ``C(K-t-1, eta-1)`` minifiles. For each serve group ``S`` with
    ``|S| = t + eta`` one transmission carries, for every ``(t+1)``-subset
    ``T`` of ``S``, the XOR of one fresh minifile of ``W_{T-k}(d_k)`` for
    each ``k`` in ``T``, zero-forced at the users ``S - T``.

    Minifile indices are assigned in lexicographic ``(S, T)`` order per
    (recipient, subfile).
    """
    cfg = _virtual(config)
    demands = _check_demands(cfg, demands)
    K, t, eta = cfg.K, cfg.t, cfg.eta
    if placement is None:
        placement = subset_placement(K, t)
    elif placement.kind != "subset":
        raise ConfigMismatch("multiserver delivery requires subset placement")
    minifiles = comb(K - t - 1, eta - 1)
    spf = comb(K, t) * minifiles
    duration = Fraction(1, spf)
    used = Counter()
    transmissions = []
    for i, S in enumerate(combinations(range(1, K + 1), t + eta), start=1):
        terms = []
        for T in combinations(S, t + 1):
            parts = []
            for k in T:
                label = SubsetPacket(tuple(u for u in T if u != k))
                used[k, label] += 1
                sub = SubpacketId(demands[k - 1], label, used[k, label])
                parts.append(Delivery(sub, StreamId(k)))
            zf = frozenset(StreamId(u) for u in S if u not in T)
            terms.append(Term.xor_of(parts, zf))
        transmissions.append(TransmissionVector(i, tuple(terms), duration))
    # every user sits in C(t+eta-1, t) codewords of each transmission
    mac = comb(t + eta - 1, t) > 1
    return DeliveryScheme(cfg, "miso-bit", placement, spf, tuple(transmissions), demands, mac)


def decouple(scheme: DeliveryScheme) -> DeliveryScheme:
    """Split each XOR codeword into plain terms, one per constituent, that
    keep the codeword's zero-forcing set."""
    if scheme.flavor != "miso-bit":
        raise WrongFlavor(f"decouple expects a miso-bit scheme, got {scheme.flavor}")
    out = []
    for tx in scheme.transmissions:
        terms = [Term.plain(d.subpacket, d.recipient, term.zf_set)
                 for term in tx.terms for d in term.parts]
        out.append(TransmissionVector(tx.index, tuple(terms), tx.duration))
    mac = any(
        max(Counter(t.recipient for t in tx.terms).values()) > 1 for tx in out
    )
    return DeliveryScheme(
        scheme.config, "miso-signal", scheme.placement, scheme.subpackets_per_file,
        tuple(out), scheme.demands, mac,
    )


@dataclass
class DemandState:
    """Outstanding subpacket counts keyed by ``(user, owner_packet)``."""

    remaining: dict = field(default_factory=dict)

    @classmethod
    def for_cyclic(cls, config: NetworkConfig) -> "DemandState":
        cfg = _virtual(config)
        if cfg.t != 1:
            raise UnsupportedT(f"cyclic delivery is implemented for t = 1 only (t={cfg.t})")
        per_packet = cfg.t + cfg.eta
        return cls({(k, p): per_packet
                    for k in range(1, cfg.K + 1)
                    for p in range(1, cfg.K + 1) if p != k})

    @property
    def total(self) -> int:
        return sum(self.remaining.values())

    def copy(self) -> "DemandState":
        return DemandState(dict(self.remaining))


@dataclass
class Schedule:
    """Search output: each group is a tuple of ``(recipient, owner)`` pairs."""

    groups: list
    nodes: int


def _rotation_candidates(K, eta):
    # leader l takes one packet from the head of a cyclic window of the other
    # users; every window member takes a packet owned by l
    out = []
    for leader in range(1, K + 1):
        others = [(leader - 1 + j) % K + 1 for j in range(1, K)]
        for j in range(K - 1):
            window = [others[(j + m) % (K - 1)] for m in range(eta)]
            pairs = [(leader, window[0])] + [(u, leader) for u in window]
            out.append(tuple(sorted(pairs)))
    return out


def _all_candidates(K, eta, remaining):
    out = []
    for S in combinations(range(1, K + 1), eta + 1):
        choices = [[(k, p) for p in S if p != k and remaining.get((k, p), 0) > 0] for k in S]
        for pairs in product(*choices):
            out.append(pairs)
    out.sort(key=lambda c: (-sum(remaining[x] for x in c), c))
    return out


def _count_all_candidates(K, eta):
    return comb(K, eta + 1) * eta ** (eta + 1)


def _dfs(candidates, remaining, budget, nodes):
    """Bounded-multiplicity depth-first search over an ordered candidate list.

    Each candidate may be used any number of times; the first option tried
    at every depth is "use once", so a list that already forms an exact
    cover is accepted without backtracking.
    """
    items = {x for c in candidates for x in c}
    if any(r > 0 and x not in items for x, r in remaining.items()):
        return None, nodes
    rem = dict(remaining)
    total = sum(rem.values())
    if total == 0:
        return [], nodes
    last_cover = {}
    for i, c in enumerate(candidates):
        for x in c:
            last_cover[x] = i
    dies_at = [[] for _ in candidates]
    for x, i in last_cover.items():
        dies_at[i].append(x)

    def options(i):
        top = min(rem.get(x, 0) for x in candidates[i])
        return [1, 0] + list(range(2, top + 1)) if top >= 1 else [0]

    stack = [[0, options(0), 0]]
    while stack:
        frame = stack[-1]
        i, opts, pos = frame
        cand = candidates[i]
        if pos:
            m = opts[pos - 1]
            for x in cand:
                rem[x] += m
            total += m * len(cand)
        if pos == len(opts):
            stack.pop()
            continue
        m = opts[pos]
        frame[2] += 1
        nodes += 1
        if nodes > budget:
            raise ScheduleNotFound(
                f"node budget {budget} exhausted", nodes=nodes, budget_exhausted=True
            )
        for x in cand:
            rem[x] -= m
        total -= m * len(cand)
        if any(rem[x] for x in dies_at[i]):
            continue
        if total == 0:
            path = []
            for fi, fopts, fpos in stack:
                path.extend([candidates[fi]] * fopts[fpos - 1])
            return path, nodes
        if i + 1 < len(candidates):
            stack.append([i + 1, options(i + 1), 0])
    return None, nodes


def schedule_search(state: DemandState, config: NetworkConfig,
                    node_budget: int = DEFAULT_NODE_BUDGET) -> Schedule:
    """Find full transmissions that drive ``state`` to zero.

    A transmission is a serve set of ``1 + eta`` users where each member
    receives a subpacket of a packet owned by another member. Candidates
    are tried in leader-rotation order first; if that does not cover the
    state, every serve set and assignment is searched, largest remaining
    demand first.
    """
    cfg = _virtual(config)
    K, eta = cfg.K, cfg.eta
    remaining = {x: r for x, r in state.remaining.items() if r > 0}
    if not remaining:
        return Schedule([], 0)
    nodes = 0
    rotation = [c for c in _rotation_candidates(K, eta)
                if all(x in remaining for x in c)]
    path, nodes = _dfs(rotation, remaining, node_budget, nodes)
    if path is None:
        n_all = _count_all_candidates(K, eta)
        if n_all > FALLBACK_CANDIDATE_LIMIT:
            raise ScheduleNotFound(
                f"rotation candidates do not cover the demand and the full "
                f"candidate space ({n_all}) is too large", nodes=nodes)
        log.info("rotation order failed after %d nodes; full search", nodes)
        path, nodes = _dfs(_all_candidates(K, eta, remaining), remaining,
                           node_budget, nodes)
    if path is None:
        raise ScheduleNotFound("search space exhausted", nodes=nodes)
    return Schedule(list(path), nodes)


def cyclic_t1_scheduler(config: NetworkConfig, demands=None,
                        node_budget: int = DEFAULT_NODE_BUDGET) -> DeliveryScheme:
    """Signal-level cyclic scheme for ``t = 1``: ``K(K-1)`` transmissions,
    each serving ``1 + eta`` users with one subpacket apiece."""
    cfg = _virtual(config)
    if cfg.t != 1:
        raise UnsupportedT(f"cyclic delivery is implemented for t = 1 only (t={cfg.t})")
    demands = _check_demands(cfg, demands)
    placement = cyclic_placement(cfg.K, cfg.t)
    schedule = schedule_search(DemandState.for_cyclic(cfg), cfg, node_budget)
    spf = cfg.K * (cfg.t + cfg.eta)
    duration = Fraction(1, spf)
    used = Counter()
    transmissions = []
    for i, group in enumerate(schedule.groups, start=1):
        served = {k for k, _ in group}
        terms = []
        for k, p in group:
            used[k, p] += 1
            sub = SubpacketId(demands[k - 1], CyclicPacket(p), used[k, p])
            zf = frozenset(StreamId(u) for u in served if u not in (k, p))
            terms.append(Term.plain(sub, StreamId(k), zf))
        transmissions.append(TransmissionVector(i, tuple(terms), duration))
    log.debug("cyclic schedule: %d transmissions, %d search nodes",
              len(transmissions), schedule.nodes)
    return DeliveryScheme(cfg, "miso-signal", placement, spf, tuple(transmissions), demands)
