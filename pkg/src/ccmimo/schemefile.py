"""Canonical JSON encoding of delivery schemes.

Layout::

    {"config": {...}, "flavor": ..., "mac_mode": ..., "placement": {...},
     "demands": {"1": 1, ...}, "subpackets_per_file": n,
     "transmissions": [{"index": i, "duration": "1/36", "terms": [...]}]}

Streams are written ``"k:g"`` in multi-stream schemes and as bare user
integers in single-stream ones. Cyclic packets are integers and subset
packets sorted integer arrays. Keys are sorted and terms are already in
canonical order, so ``dumps(loads(s)) == s`` for any ``s`` produced here.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Union

from .errors import ConfigError, SchemeFormatError
from .model import (
    CachePlacement,
    CyclicPacket,
    Delivery,
    DeliveryScheme,
    NetworkConfig,
    StreamId,
    SubpacketId,
    SubsetPacket,
    Term,
    TransmissionVector,
)

__all__ = ["to_dict", "from_dict", "dumps", "loads", "save", "load"]


def _frac(x: Fraction):
    return x.numerator if x.denominator == 1 else str(x)


def _packet_to(p):
    return p.to_json()


def _packet_from(obj, kind):
    if kind == "cyclic":
        if not isinstance(obj, int):
            raise SchemeFormatError(f"cyclic packet label must be an integer: {obj!r}")
        return CyclicPacket(obj)
    if not isinstance(obj, list):
        raise SchemeFormatError(f"subset packet label must be an array: {obj!r}")
    return SubsetPacket(tuple(obj))


def _stream_to(s: StreamId, mimo: bool):
    return str(s) if mimo else s.user


def _stream_from(obj, mimo: bool) -> StreamId:
    if mimo:
        if not isinstance(obj, str) or ":" not in obj:
            raise SchemeFormatError(f"stream must be written 'k:g': {obj!r}")
        return StreamId.parse(obj)
    if not isinstance(obj, int):
        raise SchemeFormatError(f"user must be an integer: {obj!r}")
    return StreamId(obj)


def _sub_to(sp: SubpacketId):
    out = {"file": sp.file, "packet": _packet_to(sp.packet), "q": sp.q}
    if sp.g is not None:
        out["g"] = sp.g
    return out


def _sub_from(obj, kind) -> SubpacketId:
    return SubpacketId(int(obj["file"]), _packet_from(obj["packet"], kind),
                       int(obj["q"]), obj.get("g"))


def _term_to(term: Term, mimo: bool):
    zf = [_stream_to(s, mimo) for s in sorted(term.zf_set)]
    if term.xor:
        return {
            "xor_of": [{"subpacket": _sub_to(d.subpacket),
                        "recipient": _stream_to(d.recipient, mimo)} for d in term.parts],
            "zf": zf,
        }
    return {"subpacket": _sub_to(term.subpacket),
            "recipient": _stream_to(term.recipient, mimo), "zf": zf}


def _term_from(obj, mimo: bool, kind) -> Term:
    zf = frozenset(_stream_from(s, mimo) for s in obj["zf"])
    if "xor_of" in obj:
        parts = [Delivery(_sub_from(p["subpacket"], kind), _stream_from(p["recipient"], mimo))
                 for p in obj["xor_of"]]
        return Term.xor_of(parts, zf)
    return Term.plain(_sub_from(obj["subpacket"], kind),
                      _stream_from(obj["recipient"], mimo), zf)


def config_to_dict(cfg: NetworkConfig) -> dict:
    out = {"K": cfg.K, "L": cfg.L, "G": cfg.G, "N": cfg.N, "M": _frac(cfg.M)}
    if cfg.F is not None:
        out["F"] = cfg.F
    return out


def config_from_dict(obj: dict) -> NetworkConfig:
    try:
        return NetworkConfig(K=obj["K"], L=obj["L"], G=obj["G"], N=obj["N"],
                             M=Fraction(str(obj["M"])), F=obj.get("F"))
    except KeyError as exc:
        raise ConfigError(f"config is missing key {exc}") from None


def to_dict(scheme: DeliveryScheme) -> dict:
    mimo = scheme.is_mimo
    pl = scheme.placement
    return {
        "config": config_to_dict(scheme.config),
        "flavor": scheme.flavor,
        "mac_mode": scheme.mac_mode,
        "placement": {
            "kind": pl.kind,
            "packets": [_packet_to(p) for p in pl.packets],
            "cache": {str(k): [_packet_to(p) for p in sorted(pl.cache_of(k), key=lambda p: p.to_json())]
                      for k in range(1, pl.K + 1)},
        },
        "demands": {str(k): d for k, d in enumerate(scheme.demands, start=1)},
        "subpackets_per_file": scheme.subpackets_per_file,
        "transmissions": [
            {"index": tx.index, "duration": _frac(tx.duration),
             "terms": [_term_to(t, mimo) for t in tx.terms]}
            for tx in scheme.transmissions
        ],
    }


def from_dict(obj: dict) -> DeliveryScheme:
    try:
        cfg = config_from_dict(obj["config"])
        flavor = obj["flavor"]
        mimo = flavor == "mimo-signal"
        pl = obj["placement"]
        kind = pl["kind"]
        packets = tuple(_packet_from(p, kind) for p in pl["packets"])
        cache = tuple(
            frozenset(_packet_from(p, kind) for p in pl["cache"][str(k)])
            for k in range(1, cfg.K + 1)
        )
        placement = CachePlacement(kind, packets, cache)
        demands = tuple(int(obj["demands"][str(k)]) for k in range(1, cfg.K + 1))
        transmissions = tuple(
            TransmissionVector(int(tx["index"]),
                               tuple(_term_from(t, mimo, kind) for t in tx["terms"]),
                               Fraction(str(tx["duration"])))
            for tx in obj["transmissions"]
        )
        return DeliveryScheme(cfg, flavor, placement, int(obj["subpackets_per_file"]),
                              transmissions, demands, bool(obj.get("mac_mode", False)))
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemeFormatError(f"malformed scheme: {exc!r}") from exc


def dumps(scheme: DeliveryScheme) -> str:
    return json.dumps(to_dict(scheme), sort_keys=True, indent=1) + "\n"


def loads(text: str) -> DeliveryScheme:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemeFormatError(f"scheme file is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise SchemeFormatError("scheme file must hold a JSON object")
    return from_dict(obj)


def save(scheme: DeliveryScheme, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(scheme))


def load(path: Union[str, Path]) -> DeliveryScheme:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemeFormatError(f"cannot read {path}: {exc}") from exc
    return loads(text)
