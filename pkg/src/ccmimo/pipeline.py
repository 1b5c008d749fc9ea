"""Generate -> elevate -> verify -> simulate orchestration and sweeps."""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence

import yaml

from .elevate import elevate_scheme
from .errors import ApplicabilityError, ConfigError, InputError, NotVerified
from .miso import DEFAULT_NODE_BUDGET, cyclic_t1_scheduler, decouple, multiserver_bitlevel
from .model import NetworkConfig, default_demands, demands_from_list, validate_config
from .phy import design_beamformers, sample_channels, simulate
from .verify import check_scheme, predicted_dof, predicted_subpacketization

__all__ = [
    "BASELINES",
    "CSV_COLUMNS",
    "generate",
    "build_pipeline_scheme",
    "simulate_seeds",
    "pipeline_rows",
    "load_config_file",
    "configs_from_mapping",
    "parse_seeds",
    "parse_floats",
    "thread_cap",
]

BASELINES = ("cyclic", "multiserver-bit", "multiserver-signal")

CSV_COLUMNS = [
    "K", "L", "G", "N", "M", "t", "eta", "baseline", "seed", "noise",
    "verified", "mode", "achieved_dof", "predicted_dof",
    "subpacketization", "predicted_subpacketization", "transmissions",
    "max_noiseless_error", "max_error", "mse", "expected_mse",
]


def thread_cap() -> int:
    env = os.environ.get("CCMIMO_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"CCMIMO_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def generate(config: NetworkConfig, baseline: str, demands=None,
             node_budget: int = DEFAULT_NODE_BUDGET):
    """Baseline scheme for the virtual single-stream network of ``config``."""
    if baseline == "cyclic":
        if config.eta < config.t:
            raise ApplicabilityError(
                f"cyclic baseline needs eta >= t (eta={config.eta}, t={config.t})")
        return cyclic_t1_scheduler(config, demands, node_budget)
    if baseline == "multiserver-bit":
        return multiserver_bitlevel(config, demands)
    if baseline == "multiserver-signal":
        return decouple(multiserver_bitlevel(config, demands))
    raise InputError(f"unknown baseline {baseline!r}; choose from {BASELINES}")


def build_pipeline_scheme(config: NetworkConfig, baseline: str, demands=None,
                          node_budget: int = DEFAULT_NODE_BUDGET):
    """Scheme for the real network: the baseline, elevated when signal-level."""
    base = generate(config, baseline, demands, node_budget)
    if base.flavor == "miso-bit":
        if config.G != 1:
            raise ApplicabilityError(
                "bit-level schemes cannot be elevated; use multiserver-signal")
        return base
    return elevate_scheme(base, config.G, config)


def _one_seed(scheme, seed, noise_levels, combiner_policy, cache_cancellation):
    channel = sample_channels(scheme.config, seed, combiner_policy)
    bf = design_beamformers(scheme, channel)
    return [simulate(scheme, channel, v, seed, cache_cancellation=cache_cancellation,
                     beamformers=bf, check=False) for v in noise_levels]


def simulate_seeds(scheme, seeds: Sequence[int], noise_levels: Sequence[float] = (0.0,),
                   combiner_policy: str = "identity", cache_cancellation: bool = True,
                   threads: Optional[int] = None) -> list[list]:
    """Simulation reports indexed ``[seed][noise]``. The scheme is verified
    once up front; seeds run in parallel and are merged in input order."""
    rep = check_scheme(scheme, "strict")
    if not rep.passed:
        raise NotVerified(f"scheme fails strict verification: {rep.violations[0]}")
    threads = min(threads or thread_cap(), max(len(seeds), 1))
    args = [(scheme, s, list(noise_levels), combiner_policy, cache_cancellation) for s in seeds]
    if threads <= 1:
        return [_one_seed(*a) for a in args]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda a: _one_seed(*a), args))


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def pipeline_rows(config: NetworkConfig, baseline: str, demands=None,
                  seeds: Sequence[int] = (), noise_levels: Sequence[float] = (0.0,),
                  combiner_policy: str = "identity",
                  node_budget: int = DEFAULT_NODE_BUDGET,
                  threads: Optional[int] = None) -> list[dict]:
    """Metric rows for one config: one per (seed, noise), or a single
    verification-only row when there are no seeds or the scheme cannot be
    simulated symbol by symbol."""
    scheme = build_pipeline_scheme(config, baseline, demands, node_budget)
    report = check_scheme(scheme)
    try:
        predicted_spf = predicted_subpacketization(config, baseline)
    except ApplicabilityError:
        predicted_spf = None
    base = {
        "K": config.K, "L": config.L, "G": config.G, "N": config.N, "M": config.M,
        "t": config.t, "eta": config.eta, "baseline": baseline,
        "verified": report.passed, "mode": report.mode,
        "achieved_dof": report.achieved_dof if report.passed else None,
        "predicted_dof": predicted_dof(config),
        "subpacketization": report.subpacketization,
        "predicted_subpacketization": predicted_spf,
        "transmissions": report.transmissions,
    }
    simulable = report.passed and report.mode == "strict" and scheme.flavor != "miso-bit"
    if not seeds or not simulable:
        return [dict(base)]
    levels = list(noise_levels) or [0.0]
    run_levels = levels if 0.0 in levels else [0.0] + levels
    results = simulate_seeds(scheme, seeds, run_levels, combiner_policy, threads=threads)
    rows = []
    for seed, reports in zip(seeds, results):
        by_noise = dict(zip(run_levels, reports))
        noiseless = by_noise[0.0].max_error
        for v in levels:
            r = by_noise[v]
            rows.append(dict(base, seed=seed, noise=v, max_noiseless_error=noiseless,
                             max_error=r.max_error, mse=r.mse, expected_mse=r.expected_mse))
    return rows


def format_rows(rows: Iterable[dict]) -> list[list[str]]:
    return [[_fmt(row.get(c)) for c in CSV_COLUMNS] for row in rows]


def load_config_file(path) -> dict:
    try:
        data = yaml.safe_load(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise InputError(f"config {path} is not valid YAML/JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError(f"config {path} must be a mapping")
    return data


def _as_list(x):
    return list(x) if isinstance(x, (list, tuple)) else [x]


def configs_from_mapping(raw: dict) -> list[NetworkConfig]:
    """Cartesian product over any of K, L, G, N, M given as lists. ``N``
    defaults to ``K``; ``M`` may be replaced by a caching gain ``t``."""
    if "K" not in raw or "L" not in raw:
        raise ConfigError("config needs at least K and L")
    out = []
    keys = ("K", "L", "G", "N", "M", "t")
    grids = [_as_list(raw.get(k)) for k in keys]
    for K, L, G, N, M, t in itertools.product(*grids):
        N = K if N is None else N
        if M is None:
            if t is None:
                raise ConfigError("config needs M (cache size) or t (caching gain)")
            M = Fraction(int(t) * N, K)
        out.append(validate_config(K, L, 1 if G is None else G, N,
                                   Fraction(str(M)), raw.get("F")))
    return out


def parse_seeds(value) -> list[int]:
    """``"0..49"`` (inclusive), ``"1,2,5"``, a list, or empty."""
    if value is None or value == "":
        return []
    if isinstance(value, int):
        return [value]
    if isinstance(value, (list, tuple)):
        return [int(s) for s in value]
    out = []
    for chunk in str(value).split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ".." in chunk:
            lo, hi = chunk.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(chunk))
    return out


def parse_floats(value) -> list[float]:
    if value is None or value == "":
        return []
    if isinstance(value, (int, float)):
        return [float(value)]
    if isinstance(value, (list, tuple)):
        return [float(s) for s in value]
    return [float(s) for s in str(value).split(",") if s.strip()]


def resolve_demands(raw, config: NetworkConfig):
    if raw is None or raw == "":
        return default_demands(config)
    if isinstance(raw, str):
        raw = [s.strip() for s in raw.split(",")]
    return demands_from_list(raw, config)
