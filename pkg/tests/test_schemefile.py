import json

import pytest

from ccmimo import schemefile
from ccmimo.errors import ConfigError, SchemeFormatError
from ccmimo.miso import decouple


def test_round_trip(six_user, three_user_bit, tmp_path):
    for scheme in (six_user, three_user_bit, decouple(three_user_bit)):
        text = schemefile.dumps(scheme)
        back = schemefile.loads(text)
        assert back == scheme
        assert schemefile.dumps(back) == text
        path = tmp_path / "s.json"
        schemefile.save(scheme, path)
        assert schemefile.load(path) == scheme


def test_stream_notation(six_user, three_user_bit):
    mimo = schemefile.to_dict(six_user)
    term = mimo["transmissions"][0]["terms"][0]
    assert isinstance(term["recipient"], str) and ":" in term["recipient"]
    assert mimo["transmissions"][0]["duration"] == "1/36"
    miso = schemefile.to_dict(three_user_bit)
    assert "xor_of" in miso["transmissions"][0]["terms"][0]
    assert all(isinstance(s, int) for s in miso["transmissions"][0]["terms"][0]["zf"])


def test_malformed_inputs(six_user, tmp_path):
    with pytest.raises(SchemeFormatError):
        schemefile.loads("{not json")
    with pytest.raises(SchemeFormatError):
        schemefile.loads("[]")
    obj = schemefile.to_dict(six_user)
    obj["transmissions"][0]["terms"][0]["recipient"] = 1
    with pytest.raises(SchemeFormatError):
        schemefile.from_dict(obj)
    obj = schemefile.to_dict(six_user)
    del obj["placement"]
    with pytest.raises(SchemeFormatError):
        schemefile.from_dict(obj)
    obj = schemefile.to_dict(six_user)
    obj["config"]["M"] = "1/2"
    with pytest.raises(ConfigError):
        schemefile.loads(json.dumps(obj))
    with pytest.raises(SchemeFormatError):
        schemefile.load(tmp_path / "absent.json")
