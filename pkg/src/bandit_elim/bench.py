"""Run configurations, seeded trial batches and CSV reports.

A config is a JSON object whose keys are exactly the :class:`RunConfig` field
names (``lambda`` spelled as in JSON). Every trial t of every algorithm uses an
oracle seeded by (master_seed, t), so the report depends only on the config.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import schedule
from .arms import ArmSpec, Instance, make_instance
from .oracle_checks import resolve_parallel, run_trial, wilson_interval

CSV_COLUMNS = (
    "algorithm", "n", "eps", "delta", "lambda", "alpha", "trials", "master_seed",
    "mean_total_samples", "success_count", "success_rate", "wilson_lo", "wilson_hi",
    "wall_seconds",
)
REQUIRED = ("algorithm", "n", "eps", "delta", "instance", "trials")
OPTIONAL = ("lambda", "alpha", "master_seed", "max_parallel")
ARM_KEYS = {"kind", "mean", "sigma", "count"}


class ConfigError(ValueError):
    """Invalid run configuration (CLI exit code 2)."""


class AlgorithmError(RuntimeError):
    """An algorithm failed while running trials (CLI exit code 3)."""


@dataclass
class RunConfig:
    algorithms: list[str]
    n: int
    eps: float
    delta: float
    instance: list[dict]
    trials: int
    lam: float = schedule.DEFAULT_LAMBDA
    alpha: float = schedule.DEFAULT_ALPHA
    master_seed: int = 0
    max_parallel: int = 0

    def build_instance(self) -> Instance:
        groups = []
        for g in self.instance:
            groups.append((ArmSpec(g["kind"], float(g["mean"]), float(g.get("sigma", 0.0))), int(g["count"])))
        return make_instance(groups)


def _number(d: dict, key: str, lo: float, hi: float) -> float:
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not lo < v < hi:
        raise ConfigError(f"{key} must be a number in ({lo}, {hi}), got {v!r}")
    return float(v)


def _integer(d: dict, key: str, lo: int, hi: float = math.inf) -> int:
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, int) or not lo <= v <= hi:
        raise ConfigError(f"{key} must be an integer >= {lo}, got {v!r}")
    return v


def parse_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - set(REQUIRED) - set(OPTIONAL)
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    missing = [k for k in REQUIRED if k not in raw]
    if missing:
        raise ConfigError(f"missing config fields: {missing}")

    algos = raw["algorithm"]
    algos = [algos] if isinstance(algos, str) else algos
    if not isinstance(algos, list) or not algos:
        raise ConfigError("algorithm must be a name or a non-empty list of names")
    for a in algos:
        if a not in schedule.ALGORITHMS:
            raise ConfigError(f"unknown algorithm {a!r}; choose from {schedule.ALGORITHMS}")

    cfg = RunConfig(
        algorithms=list(algos),
        n=_integer(raw, "n", 1),
        eps=_number(raw, "eps", 0.0, 1.0),
        delta=_number(raw, "delta", 0.0, 1.0),
        instance=raw["instance"],
        trials=_integer(raw, "trials", 1),
    )
    if "lambda" in raw:
        cfg.lam = _number(raw, "lambda", 0.0, 1.0)
    if "alpha" in raw:
        cfg.alpha = _number(raw, "alpha", 0.0, 1.0)
    if "master_seed" in raw:
        cfg.master_seed = _integer(raw, "master_seed", 0, 2 ** 64 - 1)
    if "max_parallel" in raw:
        cfg.max_parallel = _integer(raw, "max_parallel", 0)

    if not isinstance(cfg.instance, list) or not cfg.instance:
        raise ConfigError("instance must be a non-empty list of arm groups")
    for g in cfg.instance:
        if not isinstance(g, dict) or not {"kind", "mean", "count"} <= set(g) or set(g) - ARM_KEYS:
            raise ConfigError(f"arm group needs kind, mean, count (sigma optional): {g!r}")
        _integer(g, "count", 0)
    if sum(g["count"] for g in cfg.instance) != cfg.n:
        raise ConfigError("instance counts must sum to n")
    try:
        cfg.build_instance()
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from None
    return parse_config(raw)


@dataclass
class ReportRow:
    algorithm: str
    n: int
    eps: float
    delta: float
    lam: float
    alpha: float
    trials: int
    master_seed: int
    totals: list[int] = field(repr=False)
    success_count: int
    wall_seconds: float | None = None

    @property
    def mean_total_samples(self) -> float:
        return sum(self.totals) / len(self.totals)

    @property
    def success_rate(self) -> float:
        return self.success_count / self.trials

    @property
    def wilson(self) -> tuple[float, float]:
        return wilson_interval(self.success_count, self.trials)

    def csv_fields(self) -> list[str]:
        lo, hi = self.wilson
        total = sum(self.totals)
        # sample counts stay exact; a non-integral mean is printed as a float
        mean = str(total // self.trials) if total % self.trials == 0 else _g(self.mean_total_samples)
        wall = "" if self.wall_seconds is None else _g(self.wall_seconds)
        return [self.algorithm, str(self.n), _g(self.eps), _g(self.delta), _g(self.lam), _g(self.alpha),
                str(self.trials), str(self.master_seed), mean, str(self.success_count),
                _g(self.success_rate), _g(lo), _g(hi), wall]


def _g(x: float) -> str:
    return f"{x:.6g}"


@dataclass
class AggregateReport:
    rows: list[ReportRow]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow(r.csv_fields())
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(self.to_csv())

    def table(self) -> str:
        head = f"{'algorithm':<11}{'mean samples':>16}{'success':>12}{'rate':>9}  wilson 95%"
        lines = [head, "-" * len(head)]
        for r in self.rows:
            lo, hi = r.wilson
            lines.append(f"{r.algorithm:<11}{r.mean_total_samples:>16,.0f}"
                         f"{f'{r.success_count}/{r.trials}':>12}{r.success_rate:>9.4f}  [{lo:.4f}, {hi:.4f}]")
        return "\n".join(lines)


def run_trials(algorithm: str, instance: Instance, params: dict, trials: int,
               master_seed: int, workers: int) -> list[tuple[bool, int]]:
    """Results ordered by trial index whatever the completion order."""
    def one(t):
        return run_trial(algorithm, instance, params, master_seed, t)

    try:
        if workers == 1:
            return [one(t) for t in range(trials)]
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(one, range(trials)))
    except (ValueError, ArithmeticError) as exc:
        raise AlgorithmError(f"{algorithm}: {exc}") from exc


def run(cfg: RunConfig, timing: bool = False, log=None) -> AggregateReport:
    """Execute every algorithm of `cfg`; wall time is recorded only with `timing`."""
    instance = cfg.build_instance()
    workers = resolve_parallel(cfg.max_parallel)
    params = {"eps": cfg.eps, "delta": cfg.delta, "lam": cfg.lam, "alpha": cfg.alpha}
    rows = []
    for algo in cfg.algorithms:
        t0 = time.perf_counter()
        results = run_trials(algo, instance, params, cfg.trials, cfg.master_seed, workers)
        elapsed = time.perf_counter() - t0
        if log:
            log(f"{algo}: {cfg.trials} trials in {elapsed:.1f}s")
        rows.append(ReportRow(algo, cfg.n, cfg.eps, cfg.delta, cfg.lam, cfg.alpha, cfg.trials, cfg.master_seed,
                              [s for _, s in results], sum(ok for ok, _ in results),
                              elapsed if timing else None))
    return AggregateReport(rows)
