import csv
import json

import pytest

from ccmimo import schemefile
from ccmimo.cli import build_parser, main

SIX = ["--K", "6", "--L", "4", "--G", "2", "--N", "6", "--M", "1"]


def test_help_lists_subcommands(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--help"])
    assert info.value.code == 0
    out = capsys.readouterr().out
    for cmd in ("generate", "elevate", "verify", "simulate", "pipeline", "golden"):
        assert cmd in out
    for action in build_parser()._subparsers._group_actions[0].choices.values():
        assert action.format_help()


def test_generate_elevate_verify_simulate(tmp_path, capsys):
    v, r = tmp_path / "v.json", tmp_path / "r.json"
    assert main(["generate", *SIX, "--baseline", "cyclic", "--out", str(v)]) == 0
    assert schemefile.load(v).config.L == 2
    assert main(["elevate", "--scheme", str(v), "--G", "2", "--out", str(r)]) == 0
    rep = tmp_path / "rep.json"
    assert main(["verify", "--scheme", str(r), "--report", str(rep)]) == 0
    assert "PASS mode=strict dof=6" in capsys.readouterr().out
    assert json.loads(rep.read_text())["pass"] is True
    out, per = tmp_path / "sim.json", tmp_path / "err.csv"
    assert main(["simulate", "--scheme", str(r), "--seeds", "0..2", "--out", str(out),
                 "--csv", str(per)]) == 0
    assert json.loads(out.read_text())["max_noiseless_error"] < 1e-8
    assert len(per.read_text().splitlines()) == 1 + 3 * 180


def test_verify_failure_exit_code(tmp_path, six_user, capsys):
    bad = six_user.with_transmissions(six_user.transmissions[1:])
    path = tmp_path / "bad.json"
    schemefile.save(bad, path)
    assert main(["verify", "--scheme", str(path)]) == 1
    assert "complete/missing" in capsys.readouterr().out


def test_pipeline_csv_from_config(tmp_path, capsys):
    cfg = tmp_path / "sweep.yaml"
    cfg.write_text("K: 6\nL: 4\nG: [1, 2]\nM: 1\nbaseline: cyclic\nseeds: 0..1\nnoise: [0.01]\n")
    out = tmp_path / "rows.csv"
    assert main(["pipeline", "--config", str(cfg), "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert [(r["G"], r["achieved_dof"]) for r in rows] == [("1", "5")] * 2 + [("2", "6")] * 2


@pytest.mark.parametrize("argv,code", [
    (["generate", "--K", "4", "--L", "2", "--N", "4", "--M", "3/2"], 2),
    (["generate", "--K", "5", "--L", "2", "--N", "5", "--M", "2", "--baseline", "cyclic"], 3),
    (["generate", *SIX, "--node-budget", "5"], 4),
    (["pipeline", "--K", "3", "--L", "2", "--G", "2", "--M", "1",
      "--baseline", "multiserver-bit"], 3),
    (["verify", "--scheme", "/nonexistent/scheme.json"], 2),
    (["generate", "--L", "2"], 2),
])
def test_exit_codes(argv, code, capsys):
    assert main(argv) == code
    assert "error:" in capsys.readouterr().err


def test_golden_command(capsys):
    assert main(["golden"]) == 0
    assert capsys.readouterr().out.strip().endswith("golden: PASS")
