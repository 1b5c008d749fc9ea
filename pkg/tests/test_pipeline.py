from fractions import Fraction

import pytest

from ccmimo.errors import ApplicabilityError, ConfigError, InputError
from ccmimo.model import NetworkConfig
from ccmimo.pipeline import (
    CSV_COLUMNS,
    build_pipeline_scheme,
    configs_from_mapping,
    format_rows,
    generate,
    parse_floats,
    parse_seeds,
    pipeline_rows,
    simulate_seeds,
    thread_cap,
)


def test_sweep_expansion():
    cfgs = configs_from_mapping({"K": [4, 6], "L": 2, "G": [1, 2], "M": 1})
    assert len(cfgs) == 4
    assert {(c.K, c.G, c.N) for c in cfgs} == {(4, 1, 4), (4, 2, 4), (6, 1, 6), (6, 2, 6)}
    (c,) = configs_from_mapping({"K": 6, "L": 2, "N": 3, "t": 2})
    assert c.M == 1
    (c,) = configs_from_mapping({"K": 6, "L": 2, "M": "1/2", "N": 3})
    assert c.M == Fraction(1, 2)
    with pytest.raises(ConfigError):
        configs_from_mapping({"K": 6})
    with pytest.raises(ConfigError):
        configs_from_mapping({"K": 6, "L": 2})


def test_parsers():
    assert parse_seeds("0..3") == [0, 1, 2, 3]
    assert parse_seeds("1, 5,7..8") == [1, 5, 7, 8]
    assert parse_seeds(None) == [] and parse_seeds(4) == [4]
    assert parse_floats("1e-3,0.1") == [1e-3, 0.1]
    assert parse_floats([0, 1]) == [0.0, 1.0]


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("CCMIMO_THREADS", "3")
    assert thread_cap() == 3
    monkeypatch.setenv("CCMIMO_THREADS", "x")
    with pytest.raises(InputError):
        thread_cap()


def test_parallel_matches_serial(six_user):
    a = simulate_seeds(six_user, [0, 1, 2], [0.0, 1e-2], threads=1)
    b = simulate_seeds(six_user, [0, 1, 2], [0.0, 1e-2], threads=3)
    assert [[r.mse for r in s] for s in a] == [[r.mse for r in s] for s in b]


def test_rows_and_formatting():
    rows = pipeline_rows(NetworkConfig(6, 4, 2, 6, 1), "cyclic", seeds=[0, 1],
                         noise_levels=[1e-2])
    assert len(rows) == 2
    assert all(r["verified"] and r["achieved_dof"] == 6 for r in rows)
    assert all(r["max_noiseless_error"] < 1e-8 for r in rows)
    out = format_rows(rows)
    assert len(out[0]) == len(CSV_COLUMNS)
    (row,) = pipeline_rows(NetworkConfig(3, 2, 1, 3, 1), "multiserver-bit", seeds=[0])
    assert row["mode"] == "mac" and row["achieved_dof"] == 3 and "seed" not in row


def test_applicability():
    with pytest.raises(ApplicabilityError):
        generate(NetworkConfig(6, 1, 1, 6, 2), "cyclic")
    with pytest.raises(ApplicabilityError):
        build_pipeline_scheme(NetworkConfig(3, 2, 2, 3, 1), "multiserver-bit")
    with pytest.raises(InputError):
        generate(NetworkConfig(3, 2, 1, 3, 1), "greedy")
