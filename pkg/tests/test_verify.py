from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccmimo.errors import ApplicabilityError, InputError, NotVerified
from ccmimo.miso import decouple
from ccmimo.model import NetworkConfig, StreamId, Term, TransmissionVector
from ccmimo.verify import (
    achieved_dof,
    check_scheme,
    noncached_demand,
    predicted_dof,
    predicted_subpacketization,
    subpacketization_of,
)

from corrupt import corrupt
from oracle import oracle_problems


def _edit(scheme, pos, fn):
    """Replace the terms of the transmission at ``pos`` by ``fn(terms)``."""
    txs = list(scheme.transmissions)
    tx = txs[pos]
    txs[pos] = TransmissionVector(tx.index, tuple(fn(list(tx.terms))), tx.duration)
    return scheme.with_transmissions(txs)


def test_clean_schemes_pass(six_user, three_user_bit):
    rep = check_scheme(six_user)
    assert rep.passed and rep.mode == "strict"
    assert rep.achieved_dof == 6
    assert subpacketization_of(six_user) == 36
    rep = check_scheme(three_user_bit)
    assert rep.passed and rep.mode == "mac"
    assert rep.per_transmission_dof == [3]
    assert rep.achieved_dof == 3


def test_decoupled_three_user_needs_mac_mode(three_user_bit):
    sig = decouple(three_user_bit)
    assert check_scheme(sig, "mac").achieved_dof == 3
    strict = check_scheme(sig, "strict")
    assert not strict.passed
    assert strict.rules() == {"strict/multiple-desired"}


def test_interference_names_transmission(six_user):
    def fn(terms):
        t = terms[0]
        victim = sorted(t.zf_set)[0]
        spare = next(s for k in range(1, 7) for g in (1, 2)
                     if (s := StreamId(k, g)) not in t.zf_set and s != t.recipient)
        terms[0] = t.with_zf((t.zf_set - {victim}) | {spare})
        return terms

    bad = _edit(six_user, 4, fn)
    rep = check_scheme(bad)
    assert not rep.passed
    hits = [v for v in rep.violations if v.rule == "decode/interference"]
    assert hits and {v.transmission for v in hits} == {six_user.transmissions[4].index}
    assert "not zero-forced" in hits[0].description


def test_missing_and_duplicate(six_user):
    dropped = _edit(six_user, 0, lambda terms: terms[1:])
    assert "complete/missing" in check_scheme(dropped).rules()
    first = six_user.transmissions[0].terms[0]
    doubled = _edit(six_user, 7, lambda terms: terms + [first])
    rep = check_scheme(doubled)
    dup = [v for v in rep.violations if v.rule == "complete/duplicate"]
    # reported at every occurrence
    assert {v.transmission for v in dup} == {1, six_user.transmissions[7].index}


def test_unowed_delivery(six_user):
    def fn(terms):
        t = terms[0]
        sp = replace(t.subpacket, packet=next(iter(six_user.placement.cache_of(t.recipient.user))))
        terms[0] = Term.plain(sp, t.recipient, t.zf_set)
        return terms

    assert "complete/unowed" in check_scheme(_edit(six_user, 0, fn)).rules()


def test_xor_residual(three_user_bit):
    def fn(terms):
        t = terms[0]
        d0, d1 = t.parts
        # give the second constituent a packet the first recipient lacks
        alien = replace(d1.subpacket, packet=d0.subpacket.packet)
        terms[0] = Term.xor_of([d0, replace(d1, subpacket=alien)], t.zf_set)
        return terms

    rep = check_scheme(_edit(three_user_bit, 0, fn))
    assert "decode/xor-residual" in rep.rules()


def test_structure_rules(six_user):
    shrink = _edit(six_user, 0, lambda terms: [terms[0].with_zf(sorted(terms[0].zf_set)[1:])]
                   + terms[1:])
    assert "structure/zf-size" in check_scheme(shrink).rules()
    bad_g = _edit(six_user, 0, lambda terms: [Term.plain(replace(terms[0].subpacket, g=3),
                                                         terms[0].recipient, terms[0].zf_set)]
                  + terms[1:])
    assert "structure/range" in check_scheme(bad_g).rules()


def test_report_serialises(six_user):
    d = check_scheme(six_user).to_dict()
    assert d["pass"] is True and d["achieved_dof"] == "6"
    assert len(d["per_transmission_dof"]) == 30


def test_achieved_dof_refuses_failures(six_user):
    with pytest.raises(NotVerified):
        achieved_dof(_edit(six_user, 0, lambda terms: terms[1:]))
    with pytest.raises(InputError):
        check_scheme(six_user, "loose")


def test_predictions():
    cfg = NetworkConfig(6, 4, 2, 6, 1)
    assert predicted_subpacketization(cfg, "cyclic") == 36
    assert predicted_subpacketization(cfg, "multiserver-signal") == 2 * 6 * 4
    assert predicted_dof(cfg) == 6
    with pytest.raises(ApplicabilityError):
        predicted_subpacketization(NetworkConfig(6, 1, 1, 6, 2), "cyclic")


def test_noncached_demand(six_user):
    assert noncached_demand(six_user) == 6 * Fraction(5, 6)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_verifier_agrees_with_oracle(six_user, three_user_bit, seed):
    rng = np.random.default_rng(seed)
    for base in (six_user, three_user_bit):
        mode = "mac" if base.mac_mode else "strict"
        bad, _, _ = corrupt(base, rng)
        assert check_scheme(bad, mode).passed == (not oracle_problems(bad, mode))
