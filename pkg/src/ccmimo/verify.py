"""Combinatorial correctness checks and scheme metrics.

Failures are returned as :class:`Violation` records, never raised, so
corrupted schemes can be checked in bulk.

Rule ids
--------
``structure/*``
    well-formedness: flavor, index ranges, zero-forcing set sizes;
``decode/interference``
    a term reaches a stream that neither caches it nor is zero-forced;
``decode/xor-residual``
    a desired codeword contains a constituent the recipient cannot remove;
``strict/multiple-desired``
    strict mode allows one desired term per receive dimension;
``complete/missing``, ``complete/duplicate``, ``complete/unowed``
    delivered multiset differs from owed multiset.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Optional

from .errors import ApplicabilityError, InputError, NotVerified
from .model import DeliveryScheme, NetworkConfig, SubpacketId, Term
from .placement import is_cached

__all__ = [
    "Violation",
    "VerificationReport",
    "check_scheme",
    "achieved_dof",
    "subpacketization_of",
    "predicted_subpacketization",
    "predicted_dof",
    "noncached_demand",
]


@dataclass(frozen=True)
class Violation:
    transmission: Optional[int]
    where: str
    rule: str
    description: str

    def to_dict(self):
        return {
            "transmission": self.transmission,
            "where": self.where,
            "rule": self.rule,
            "description": self.description,
        }


@dataclass
class VerificationReport:
    passed: bool
    violations: list
    per_transmission_dof: list
    achieved_dof: Optional[Fraction]
    subpacketization: int
    transmissions: int
    mode: str
    per_transmission_load: list = field(default_factory=list)

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}

    def to_dict(self):
        return {
            "pass": self.passed,
            "mode": self.mode,
            "achieved_dof": None if self.achieved_dof is None else str(self.achieved_dof),
            "subpacketization": self.subpacketization,
            "transmissions": self.transmissions,
            "per_transmission_dof": list(self.per_transmission_dof),
            "per_transmission_load": list(self.per_transmission_load),
            "violations": [v.to_dict() for v in self.violations],
        }


def noncached_demand(scheme: DeliveryScheme) -> Fraction:
    """Total demand in files that users do not already hold."""
    return sum((1 - scheme.placement.cached_fraction(k)
                for k in range(1, scheme.config.K + 1)), Fraction(0))


def _structure(scheme: DeliveryScheme, out: list):
    cfg = scheme.config
    packets = set(scheme.placement.packets)
    g_range = scheme.g_range
    zf_size = cfg.L - 1
    if not scheme.is_mimo and cfg.G != 1:
        out.append(Violation(None, "scheme", "structure/flavor",
                             f"{scheme.flavor} scheme with G={cfg.G}"))
    want_parts = cfg.t + 1 if scheme.flavor == "miso-bit" else 1

    def stream_ok(s):
        return 1 <= s.user <= cfg.K and 1 <= s.stream <= g_range

    for tx in scheme.transmissions:
        for term in tx.terms:
            where = str(term)
            if term.xor != (scheme.flavor == "miso-bit") or len(term.parts) != want_parts:
                out.append(Violation(tx.index, where, "structure/term-kind",
                                     f"expected {want_parts}-part "
                                     f"{'xor' if want_parts > 1 else 'plain'} term"))
            if len(term.zf_set) != zf_size:
                out.append(Violation(tx.index, where, "structure/zf-size",
                                     f"|zf| = {len(term.zf_set)}, expected {zf_size}"))
            for s in term.zf_set:
                if not stream_ok(s):
                    out.append(Violation(tx.index, where, "structure/range",
                                         f"zero-forcing stream {s} out of range"))
            seen = set()
            for d in term.parts:
                sp = d.subpacket
                if not stream_ok(d.recipient):
                    out.append(Violation(tx.index, where, "structure/range",
                                         f"recipient {d.recipient} out of range"))
                if d.recipient in term.zf_set:
                    out.append(Violation(tx.index, where, "structure/recipient-in-zf",
                                         f"recipient {d.recipient} is zero-forced"))
                if d.recipient.user in seen:
                    out.append(Violation(tx.index, where, "structure/term-kind",
                                         f"user {d.recipient.user} appears twice in a codeword"))
                seen.add(d.recipient.user)
                bad = []
                if not 1 <= sp.file <= cfg.N:
                    bad.append("file")
                if sp.packet not in packets:
                    bad.append("packet")
                if not 1 <= sp.q <= scheme.q_range:
                    bad.append("q")
                if scheme.is_mimo:
                    if sp.g is None or not 1 <= sp.g <= g_range:
                        bad.append("g")
                elif sp.g is not None:
                    bad.append("g")
                if bad:
                    out.append(Violation(tx.index, where, "structure/range",
                                         f"{sp}: {', '.join(bad)} out of range"))


def _decodability(scheme: DeliveryScheme, mode: str, out: list):
    placement = scheme.placement
    bit = scheme.flavor == "miso-bit"
    dof, load = [], []
    for tx in scheme.transmissions:
        served = sorted(tx.served)
        dof.append(len(served))
        worst = 0
        for r in served:
            desired = [t for t in tx.terms if r in t.recipients]
            for term in tx.terms:
                if term in desired:
                    if bit:
                        for d in term.parts:
                            if d.recipient != r and not is_cached(placement, r.user, d.subpacket):
                                out.append(Violation(
                                    tx.index, f"{r} <- {term}", "decode/xor-residual",
                                    f"{d.subpacket} is not cached at user {r.user}"))
                    continue
                if r in term.zf_set:
                    continue
                if all(is_cached(placement, r.user, d.subpacket) for d in term.parts):
                    continue
                out.append(Violation(
                    tx.index, f"{r} <- {term}", "decode/interference",
                    f"term reaches stream {r} uncached and not zero-forced"))
            if len(desired) > 1 and mode == "strict":
                out.append(Violation(
                    tx.index, str(r), "strict/multiple-desired",
                    f"{len(desired)} desired terms at {r}"))
            worst = max(worst, len(desired))
        load.append(worst)
    return dof, load


def _owed(scheme: DeliveryScheme):
    g_values = range(1, scheme.g_range + 1) if scheme.is_mimo else (None,)
    owed = {}
    for k in range(1, scheme.config.K + 1):
        cached = scheme.placement.cache_of(k)
        owed[k] = {
            SubpacketId(scheme.demand_of(k), p, q, g)
            for p in scheme.placement.packets if p not in cached
            for q in range(1, scheme.q_range + 1)
            for g in g_values
        }
    return owed


def _completeness(scheme: DeliveryScheme, out: list):
    owed = _owed(scheme)
    where_seen = defaultdict(list)
    for tx in scheme.transmissions:
        for d in tx.deliveries():
            k = d.recipient.user
            if k not in owed or d.subpacket not in owed[k]:
                out.append(Violation(tx.index, f"{d.subpacket}->{d.recipient}",
                                     "complete/unowed",
                                     f"user {k} does not need {d.subpacket}"))
                continue
            where_seen[k, d.subpacket].append(tx.index)
    for (k, sp), idx in sorted(where_seen.items(), key=lambda kv: (kv[0][0], kv[0][1].sort_key())):
        if len(idx) > 1:
            for i in idx:
                out.append(Violation(i, f"{sp}->user {k}", "complete/duplicate",
                                     f"delivered {len(idx)} times, in transmissions {idx}"))
    for k in sorted(owed):
        for sp in sorted(owed[k], key=SubpacketId.sort_key):
            if (k, sp) not in where_seen:
                out.append(Violation(None, f"{sp}->user {k}", "complete/missing",
                                     f"user {k} never receives {sp}"))


def check_scheme(scheme: DeliveryScheme, mode: Optional[str] = None) -> VerificationReport:
    """Check decodability of every stream in every transmission and exact
    completeness of the delivered multiset.

    ``mode`` defaults to ``"mac"`` for schemes flagged ``mac_mode`` and
    ``"strict"`` otherwise. Mac mode lets several desired terms share one
    receive dimension and charges each transmission ``duration x load``
    of time, where load is the largest number of desired terms at any
    dimension.
    """
    if mode is None:
        mode = "mac" if scheme.mac_mode else "strict"
    if mode not in ("strict", "mac"):
        raise InputError(f"unknown verification mode {mode!r}")
    violations: list = []
    _structure(scheme, violations)
    dof, load = _decodability(scheme, mode, violations)
    _completeness(scheme, violations)
    total_time = sum((tx.duration * max(n, 1) for tx, n in zip(scheme.transmissions, load)),
                     Fraction(0))
    dof_value = noncached_demand(scheme) / total_time if total_time else None
    return VerificationReport(
        passed=not violations,
        violations=violations,
        per_transmission_dof=dof,
        achieved_dof=dof_value,
        subpacketization=scheme.subpackets_per_file,
        transmissions=len(scheme.transmissions),
        mode=mode,
        per_transmission_load=load,
    )


def achieved_dof(scheme: DeliveryScheme, mode: Optional[str] = None) -> Fraction:
    report = check_scheme(scheme, mode)
    if not report.passed:
        raise NotVerified(f"scheme fails verification ({len(report.violations)} violations)")
    return report.achieved_dof


def subpacketization_of(scheme: DeliveryScheme) -> int:
    """Number of distinct (packet, q, g) labels the scheme transmits."""
    labels = {(d.subpacket.packet, d.subpacket.q, d.subpacket.g)
              for tx in scheme.transmissions for d in tx.deliveries()}
    return len(labels)


def predicted_subpacketization(config: NetworkConfig, baseline_kind: str) -> int:
    K, t, eta, G = config.K, config.t, config.eta, config.G
    kind = baseline_kind.split("-")[0]
    if kind == "cyclic":
        if eta < t:
            raise ApplicabilityError(f"cyclic baseline needs eta >= t (eta={eta}, t={t})")
        return G * K * (t + eta)
    if kind == "multiserver":
        return G * comb(K, t) * comb(K - t - 1, eta - 1)
    raise InputError(f"unknown baseline {baseline_kind!r}")


def predicted_dof(config: NetworkConfig) -> int:
    return config.G * config.t + config.L
