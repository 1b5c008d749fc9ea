"""Regression against hand-transcribed golden scheme fragments.

Fragments write subpackets as ``"A_2"`` or ``"A_2^{1,1}"``: file letter,
packet, then optional ``q`` and ``g`` indices. The
recipient of a fragment term is the user requesting its file and, for
elevated fragments, the stream numbered by the ``g`` index.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .elevate import elevate_scheme
from .miso import cyclic_t1_scheduler, decouple, multiserver_bitlevel
from .model import (
    CyclicPacket,
    Delivery,
    DeliveryScheme,
    StreamId,
    SubpacketId,
    SubsetPacket,
    Term,
    demands_from_list,
)
from .pipeline import build_pipeline_scheme
from .relabel import canonical_relabel
from .schemefile import config_from_dict
from .verify import check_scheme

__all__ = ["load_golden", "parse_fragment", "match_fragment", "run_golden", "GoldenResult"]

_DATA = re.compile(r"^([A-Z])_(\d+|\{[\d,]+\})(?:\^\{?(\d+)(?:,(\d+))?\}?)?$")


def load_golden(path: Optional[Path] = None) -> dict:
    if path is None:
        text = resources.files("ccmimo").joinpath("data/golden.json").read_text()
    else:
        text = Path(path).read_text()
    return json.loads(text)


def _subpacket(text: str, kind: str) -> SubpacketId:
    m = _DATA.match(text.strip())
    if not m:
        raise ValueError(f"cannot parse subpacket {text!r}")
    letter, packet, q, g = m.groups()
    file = ord(letter) - ord("A") + 1
    members = tuple(int(x) for x in packet.strip("{}").split(","))
    label = CyclicPacket(members[0]) if kind == "cyclic" else SubsetPacket(members)
    return SubpacketId(file, label, int(q) if q else 1, int(g) if g else None)


def _recipient(sp: SubpacketId, demands) -> StreamId:
    users = [k for k, d in enumerate(demands, start=1) if d == sp.file]
    if len(users) != 1:
        raise ValueError(f"file of {sp} is not requested by exactly one user")
    return StreamId(users[0], sp.g or 1)


def _stream(x) -> StreamId:
    return StreamId.parse(x) if isinstance(x, str) else StreamId(int(x))


def parse_fragment(items: list, demands, kind: str) -> frozenset:
    terms = set()
    for item in items:
        zf = frozenset(_stream(s) for s in item["zf"])
        if "xor" in item:
            parts = []
            for text in item["xor"]:
                sp = _subpacket(text, kind)
                parts.append(Delivery(sp, _recipient(sp, demands)))
            terms.add(Term.xor_of(parts, zf))
        else:
            sp = _subpacket(item["data"], kind)
            terms.add(Term.plain(sp, _recipient(sp, demands), zf))
    return frozenset(terms)


def _label(term: Term) -> str:
    return " xor ".join(str(d.subpacket) for d in term.parts)


def match_fragment(scheme: DeliveryScheme, fragment: frozenset) -> list[str]:
    """Problems found locating ``fragment`` as one transmission of the
    (already relabelled) ``scheme``; empty when it is present."""
    deliveries = {d for t in fragment for d in t.parts}
    candidates = []
    for tx in scheme.transmissions:
        if frozenset(tx.terms) == fragment:
            return []
        if set(tx.deliveries()) == deliveries:
            candidates.append(tx)
    if not candidates:
        names = ", ".join(sorted(_label(t) for t in fragment))
        return [f"no transmission delivers exactly {{{names}}}"]
    tx = candidates[0]
    have = {tuple(t.parts): t for t in tx.terms}
    problems = []
    for want in sorted(fragment, key=Term.sort_key):
        got = have.get(tuple(want.parts))
        if got is None:
            problems.append(f"term {_label(want)}: codeword grouping differs in transmission {tx.index}")
        elif got.zf_set != want.zf_set:
            exp = ",".join(map(str, sorted(want.zf_set)))
            act = ",".join(map(str, sorted(got.zf_set)))
            problems.append(f"term {_label(want)}: zf set expected [{exp}] got [{act}] "
                            f"(transmission {tx.index})")
    return problems


@dataclass
class GoldenResult:
    lines: list = field(default_factory=list)
    failures: int = 0

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def check(self, name: str, problems: list[str]):
        if problems:
            self.failures += 1
            self.lines.append(f"FAIL {name}")
            self.lines.extend(f"  - {p}" for p in problems)
        else:
            self.lines.append(f"PASS {name}")

    def expect(self, name: str, got, want):
        self.check(name, [] if got == want else [f"expected {want}, got {got}"])


def run_golden(path: Optional[Path] = None) -> GoldenResult:
    gold = load_golden(path)
    res = GoldenResult()

    ex1 = gold["three_user"]
    cfg = config_from_dict(ex1["config"])
    demands = demands_from_list(ex1["demands"], cfg)
    bit = canonical_relabel(multiserver_bitlevel(cfg, demands))
    sig = canonical_relabel(decouple(bit))
    for name, scheme, frags in (("three-user bit", bit, ex1["bit"]),
                                ("three-user signal", sig, ex1["signal"])):
        for key, items in frags.items():
            problems = match_fragment(scheme, parse_fragment(items, demands, "subset"))
            if len(scheme.transmissions) != len(frags):
                problems.append(f"expected {len(frags)} transmission(s), "
                                f"got {len(scheme.transmissions)}")
            res.check(f"{name} {key}", problems)
    res.expect("three-user subpacketization", bit.subpackets_per_file, ex1["subpacketization"])

    ex = gold["six_user"]
    cfg = config_from_dict(ex["config"])
    demands = demands_from_list(ex["demands"], cfg)
    virtual = canonical_relabel(cyclic_t1_scheduler(cfg, demands))
    for key, items in ex["virtual"].items():
        res.check(f"virtual {key}", match_fragment(virtual, parse_fragment(items, demands, "cyclic")))
    real = canonical_relabel(elevate_scheme(virtual, cfg.G, cfg))
    for key, items in ex["elevated"].items():
        res.check(f"elevated {key}", match_fragment(real, parse_fragment(items, demands, "cyclic")))
    report = check_scheme(real, "strict")
    res.check("elevated strict verification",
              [f"{v.rule} at {v.transmission}: {v.description}" for v in report.violations[:5]])
    res.expect("elevated subpacketization", real.subpackets_per_file, ex["subpacketization"])
    res.expect("elevated transmissions", len(real.transmissions), ex["transmissions"])
    res.expect("elevated streams per transmission", set(report.per_transmission_dof),
               {ex["streams_per_transmission"]})
    res.expect("elevated DoF", report.achieved_dof, ex["dof"])

    miso_cfg = cfg.with_(G=1)
    miso = check_scheme(build_pipeline_scheme(miso_cfg, "cyclic"))
    res.expect("single-stream receiver DoF", miso.achieved_dof if miso.passed else None,
               ex["miso_dof"])
    return res
