"""Command-line driver.

Exit codes: 0 success, 1 check failure, 2 input error, 3 applicability,
4 search budget exhausted.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import schemefile
from .elevate import elevate_scheme
from .errors import CCMimoError, InputError
from .golden import run_golden
from .miso import DEFAULT_NODE_BUDGET
from .pipeline import (
    BASELINES,
    CSV_COLUMNS,
    configs_from_mapping,
    format_rows,
    generate,
    load_config_file,
    parse_floats,
    parse_seeds,
    pipeline_rows,
    resolve_demands,
    simulate_seeds,
)
from .verify import check_scheme

log = logging.getLogger("ccmimo")


def _write(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _raw_config(args) -> dict:
    raw = load_config_file(args.config) if getattr(args, "config", None) else {}
    for key in ("K", "L", "G", "N", "M", "F"):
        val = getattr(args, key, None)
        if val is not None:
            raw[key] = val
    return raw


def _single_config(raw):
    cfgs = configs_from_mapping(raw)
    if len(cfgs) != 1:
        raise InputError("this command takes a single configuration, not a sweep")
    return cfgs[0]


def cmd_generate(args) -> int:
    raw = _raw_config(args)
    cfg = _single_config(raw)
    baseline = args.baseline or raw.get("baseline", "cyclic")
    if baseline not in BASELINES:
        raise InputError(f"unknown baseline {baseline!r}; choose from {', '.join(BASELINES)}")
    demands = resolve_demands(args.demands if args.demands is not None else raw.get("demands"), cfg)
    budget = args.node_budget or raw.get("search_node_budget", DEFAULT_NODE_BUDGET)
    scheme = generate(cfg, baseline, demands, int(budget))
    _write(args.out, schemefile.dumps(scheme))
    print(f"subpacketization {scheme.subpackets_per_file}, "
          f"transmissions {len(scheme.transmissions)}", file=sys.stderr)
    return 0


def cmd_elevate(args) -> int:
    scheme = schemefile.load(args.scheme)
    out = elevate_scheme(scheme, args.G)
    _write(args.out, schemefile.dumps(out))
    print(f"subpacketization {out.subpackets_per_file}, "
          f"transmissions {len(out.transmissions)}", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    scheme = schemefile.load(args.scheme)
    report = check_scheme(scheme, args.mode)
    text = json.dumps(report.to_dict(), sort_keys=True, indent=1) + "\n"
    if args.report:
        Path(args.report).write_text(text)
    status = "PASS" if report.passed else "FAIL"
    print(f"{status} mode={report.mode} dof={report.achieved_dof} "
          f"subpacketization={report.subpacketization} "
          f"transmissions={report.transmissions} violations={len(report.violations)}")
    for v in report.violations[:20]:
        print(f"  [{v.rule}] tx {v.transmission}: {v.where}: {v.description}")
    return 0 if report.passed else 1


def cmd_simulate(args) -> int:
    scheme = schemefile.load(args.scheme)
    seeds = parse_seeds(args.seeds) or [0]
    noise = parse_floats(args.noise) or [0.0]
    results = simulate_seeds(scheme, seeds, noise, args.combiner,
                             cache_cancellation=not args.no_cache_cancellation)
    runs = [r for per_seed in results for r in per_seed]
    payload = {
        "seeds": seeds,
        "noise": noise,
        "max_noiseless_error": max((r.max_error for r in runs if r.noise_variance == 0.0),
                                   default=None),
        "runs": [r.to_dict() if args.records else r.summary() for r in runs],
    }
    _write(args.out, json.dumps(payload, sort_keys=True, indent=1) + "\n")
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["seed", "noise", "transmission", "stream", "error"])
        for r in runs:
            for rec in r.records:
                w.writerow([r.seed, repr(r.noise_variance), rec.transmission,
                            str(rec.stream), repr(rec.error)])
        Path(args.csv).write_text(buf.getvalue())
    return 0


def cmd_pipeline(args) -> int:
    raw = _raw_config(args)
    baseline = args.baseline or raw.get("baseline", "cyclic")
    if baseline not in BASELINES:
        raise InputError(f"unknown baseline {baseline!r}; choose from {', '.join(BASELINES)}")
    seeds = parse_seeds(args.seeds if args.seeds is not None else raw.get("seeds"))
    noise = parse_floats(args.noise if args.noise is not None else raw.get("noise")) or [0.0]
    policy = args.combiner or raw.get("combiner_policy", "identity")
    budget = int(raw.get("search_node_budget", DEFAULT_NODE_BUDGET))
    rows = []
    for cfg in configs_from_mapping(raw):
        demands = resolve_demands(raw.get("demands"), cfg)
        rows.extend(pipeline_rows(cfg, baseline, demands, seeds, noise, policy, budget))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerows(format_rows(rows))
    _write(args.out, buf.getvalue())
    return 0 if all(r["verified"] for r in rows) else 1


def cmd_golden(args) -> int:
    res = run_golden(args.golden_file)
    print("\n".join(res.lines))
    print("golden: " + ("PASS" if res.passed else f"FAIL ({res.failures} check(s))"))
    return 0 if res.passed else 1


def _add_network_flags(p):
    p.add_argument("--config", help="YAML/JSON config file")
    for key, typ in (("K", int), ("L", int), ("G", int), ("N", int), ("M", str), ("F", int)):
        p.add_argument(f"--{key}", dest=key, type=typ, help=f"override {key}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccmimo",
        description="Coded-caching delivery schemes for multi-antenna networks.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build a baseline scheme for the virtual network")
    _add_network_flags(p)
    p.add_argument("--baseline", choices=BASELINES)
    p.add_argument("--demands", help="comma-separated file indices or letters, one per user")
    p.add_argument("--node-budget", type=int, help="search node budget (cyclic)")
    p.add_argument("--out", help="output scheme file (default stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("elevate", help="stretch a signal-level scheme for G-stream receivers")
    p.add_argument("--scheme", required=True)
    p.add_argument("--G", dest="G", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_elevate)

    p = sub.add_parser("verify", help="check decodability and completeness")
    p.add_argument("--scheme", required=True)
    p.add_argument("--mode", choices=("strict", "mac"))
    p.add_argument("--report", help="write the JSON report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="link-level simulation of a strict scheme")
    p.add_argument("--scheme", required=True)
    p.add_argument("--seeds", default="0", help="e.g. 0..49 or 1,2,3")
    p.add_argument("--noise", default="0", help="comma-separated noise variances")
    p.add_argument("--combiner", choices=("identity", "svd"), default="identity")
    p.add_argument("--no-cache-cancellation", action="store_true",
                   help="diagnostic: skip cache-aided interference removal")
    p.add_argument("--records", action="store_true", help="include per-stream records in the JSON")
    p.add_argument("--out")
    p.add_argument("--csv", help="per-stream error CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pipeline", help="generate, elevate, verify and simulate; emit CSV")
    _add_network_flags(p)
    p.add_argument("--baseline", choices=BASELINES)
    p.add_argument("--seeds")
    p.add_argument("--noise")
    p.add_argument("--combiner", choices=("identity", "svd"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("golden", help="regression against the transcribed worked examples")
    p.add_argument("--golden-file", type=Path)
    p.set_defaults(func=cmd_golden)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CCMimoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
