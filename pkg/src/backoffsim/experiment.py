"""Sweeps over (algorithm, n) cells, aggregation, CSV I/O and baseline comparison.

Config files are INI text with an ``[experiment]`` section and an optional
``[full_scale]`` section whose keys override the desk-scale values::

    [experiment]
    name = fig9e-ratio
    algorithms = beb; stb
    n_grid = 10000, 50000, 100000
    trials = 25
    cost_model = classic
    timing_profile = 80211g-default
    payload_bytes = 64
    master_seed = 20211
    metrics = collisions

    [full_scale]
    n_grid = 400:100000:400
    trials = 200

``algorithms`` holds policy descriptors separated by ``;`` or whitespace (a
descriptor may itself contain commas, e.g. ``tstb:w0=4,c=1.0``).  ``n_grid``
is either a list or an inclusive ``start:stop:step`` range.
"""

from __future__ import annotations

import configparser
import csv
import io
import logging
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .costs import CostModel, makespan
from .engine import DEFAULT_SAFETY_CAP, SafetyCapExceeded, count_max_station_collisions, run_trial
from .policies import BackoffPolicy, PolicyError
from .rng import derive_seed
from .stats import SampleSet, SummaryRow, pct_change, summarize
from .timing import execution_time_of_trace, profile

log = logging.getLogger(__name__)

METRICS = (
    "cw_slots",
    "collisions",
    "makespan",
    "exec_time_us",
    "half_done_slot",
    "alo",
    "max_station_collisions",
)

CSV_COLUMNS = ["algorithm", "n", "metric", "count", "outliers_removed",
               "median", "ci_low", "ci_high", "mean"]

_BOOTSTRAP_SALT = 0xB007


class ConfigError(ValueError):
    pass


def parse_grid(text: str) -> list[int]:
    """``"10:150:10"`` (inclusive) or ``"1024, 4096"``."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [int(float(p)) for p in text.split(":")]
            if len(parts) == 2:
                parts.append(1)
            start, stop, step = parts
            if step <= 0:
                raise ConfigError("grid step must be positive")
            return list(range(start, stop + 1, step))
        return [int(float(p)) for p in re.split(r"[,\s]+", text) if p]
    except ValueError:
        raise ConfigError(f"bad n grid {text!r}") from None


def split_descriptors(text: str) -> list[str]:
    """Split a list of policy descriptors.

    ``;`` and whitespace always separate; a comma separates unless the next
    token is a ``key=value`` parameter of the preceding descriptor.
    """
    out: list[str] = []
    for chunk in re.split(r"[;\s]+", text.strip()):
        for tok in filter(None, chunk.split(",")):
            if "=" in tok and ":" not in tok and out:
                out[-1] += ("," if ":" in out[-1] else ":") + tok
            else:
                out.append(tok)
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    algorithms: tuple
    n_grid: tuple
    trials: int
    cost_model: CostModel = field(default_factory=CostModel.classic)
    timing_profile: Optional[str] = None
    payload_bytes: Optional[int] = None
    master_seed: int = 0
    metrics: tuple = ("cw_slots",)
    name: str = "experiment"
    truncate_tail: bool = False
    safety_cap: int = DEFAULT_SAFETY_CAP

    def __post_init__(self):
        algs = tuple(a.strip().lower() for a in self.algorithms)
        if not algs:
            raise ConfigError("no algorithms given")
        try:
            for a in algs:
                BackoffPolicy.parse(a)
        except PolicyError as exc:
            raise ConfigError(str(exc)) from None
        object.__setattr__(self, "algorithms", algs)
        grid = tuple(int(n) for n in self.n_grid)
        if not grid or any(n < 1 for n in grid):
            raise ConfigError("n_grid must hold positive batch sizes")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("n_grid must be strictly increasing")
        object.__setattr__(self, "n_grid", grid)
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        metrics = tuple(m.strip() for m in self.metrics)
        unknown = [m for m in metrics if m not in METRICS]
        if unknown or not metrics:
            raise ConfigError(f"unknown metrics {unknown}; choose from {', '.join(METRICS)}")
        object.__setattr__(self, "metrics", metrics)
        if self.timing_profile is not None:
            try:
                profile(self.timing_profile)
            except KeyError as exc:
                raise ConfigError(str(exc)) from None

    @property
    def policies(self) -> list[BackoffPolicy]:
        return [BackoffPolicy.parse(a) for a in self.algorithms]

    def trial_seed(self, a_idx: int, n_idx: int, t: int) -> int:
        return derive_seed(self.master_seed, a_idx, n_idx, t)

    def timing(self):
        params = profile(self.timing_profile or "80211g-default")
        if self.payload_bytes is not None:
            params = params.with_payload(self.payload_bytes)
        return params


def _config_from_section(sec, base: Optional[dict] = None) -> dict:
    kw = dict(base or {})
    if "name" in sec:
        kw["name"] = sec["name"].strip()
    if "algorithms" in sec:
        kw["algorithms"] = split_descriptors(sec["algorithms"])
    if "n_grid" in sec:
        kw["n_grid"] = parse_grid(sec["n_grid"])
    try:
        if "trials" in sec:
            kw["trials"] = int(sec["trials"])
        if "master_seed" in sec:
            kw["master_seed"] = int(sec["master_seed"], 0)
        if "payload_bytes" in sec:
            kw["payload_bytes"] = int(sec["payload_bytes"])
        if "safety_cap" in sec:
            kw["safety_cap"] = int(float(sec["safety_cap"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if "cost_model" in sec:
        try:
            kw["cost_model"] = CostModel.parse(sec["cost_model"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if "timing_profile" in sec:
        kw["timing_profile"] = sec["timing_profile"].strip() or None
    if "metrics" in sec:
        kw["metrics"] = tuple(m for m in re.split(r"[,;\s]+", sec["metrics"]) if m)
    if "truncate_tail" in sec:
        kw["truncate_tail"] = sec.getboolean("truncate_tail")
    return kw


def parse_config(text: str, full_scale: bool = False) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    if "experiment" not in parser:
        raise ConfigError("config needs an [experiment] section")
    kw = _config_from_section(parser["experiment"])
    if full_scale and "full_scale" in parser:
        kw = _config_from_section(parser["full_scale"], kw)
    missing = {"algorithms", "n_grid", "trials"} - kw.keys()
    if missing:
        raise ConfigError(f"config is missing {', '.join(sorted(missing))}")
    try:
        return ExperimentConfig(**kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, full_scale: bool = False) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config(text, full_scale)


def scenario_names() -> list[str]:
    files = resources.files("backoffsim") / "scenarios"
    return sorted(p.name[:-4] for p in files.iterdir() if p.name.endswith(".ini"))


def load_scenario(name: str, full_scale: bool = False) -> ExperimentConfig:
    res = resources.files("backoffsim") / "scenarios" / f"{name}.ini"
    if not res.is_file():
        raise ConfigError(f"unknown scenario {name!r}; known: {', '.join(scenario_names())}")
    return parse_config(res.read_text(encoding="utf-8"), full_scale)


def _trial_metrics(item) -> Optional[dict]:
    descriptor, n, seed, cfg = item
    policy = BackoffPolicy.parse(descriptor)
    try:
        trace = run_trial(policy, n, seed,
                          log_stations="max_station_collisions" in cfg.metrics,
                          truncate_tail=cfg.truncate_tail,
                          safety_cap=cfg.safety_cap)
    except SafetyCapExceeded as exc:
        log.warning("%s", exc)
        return None
    out = {}
    for m in cfg.metrics:
        if m == "cw_slots":
            out[m] = trace.cw_slots_total
        elif m == "collisions":
            out[m] = trace.collision_slots_total
        elif m == "makespan":
            out[m] = makespan(trace, cfg.cost_model)
        elif m == "exec_time_us":
            out[m] = execution_time_of_trace(trace, cfg.timing())
        elif m == "half_done_slot":
            out[m] = trace.half_done_slot
        elif m == "alo":
            out[m] = trace.alo_instances
        elif m == "max_station_collisions":
            out[m] = count_max_station_collisions(trace)
    return out


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list
    # raw per-trial values keyed by (algorithm, n, metric); None for failed cells
    samples: dict

    @property
    def failed(self) -> list:
        return [r for r in self.rows if r.failed]

    def row(self, algorithm: str, n: int, metric: str) -> SummaryRow:
        for r in self.rows:
            if r.label == (algorithm, n, metric):
                return r
        raise KeyError((algorithm, n, metric))

    def medians(self, algorithm: str, metric: str) -> list[float]:
        return [self.row(algorithm, n, metric).median for n in self.config.n_grid]

    def to_csv(self) -> str:
        return rows_to_csv(self.rows)


def run_experiment(cfg: ExperimentConfig, workers: int = 1, resamples: int = 10000) -> ExperimentResult:
    """Run every (algorithm, n) cell and summarize each metric.

    Output does not depend on ``workers``: every trial's seed is fixed by its
    coordinates and rows are assembled in (algorithm, n, metric) order.
    """
    items = []
    coords = []
    for a_idx, alg in enumerate(cfg.algorithms):
        for n_idx, n in enumerate(cfg.n_grid):
            for t in range(cfg.trials):
                items.append((alg, n, cfg.trial_seed(a_idx, n_idx, t), cfg))
                coords.append((a_idx, n_idx))

    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_trial_metrics, items, chunksize=max(1, len(items) // (8 * workers))))
    else:
        results = [_trial_metrics(it) for it in items]

    per_cell: dict = {}
    for (a_idx, n_idx), res in zip(coords, results):
        per_cell.setdefault((a_idx, n_idx), []).append(res)

    rows = []
    samples = {}
    for a_idx, alg in enumerate(cfg.algorithms):
        for n_idx, n in enumerate(cfg.n_grid):
            trial_results = per_cell[(a_idx, n_idx)]
            failed = any(r is None for r in trial_results)
            for m_idx, metric in enumerate(cfg.metrics):
                label = (alg, n, metric)
                if failed:
                    rows.append(SummaryRow.failed_cell(label))
                    samples[label] = None
                    continue
                values = [r[metric] for r in trial_results]
                samples[label] = values
                seed = derive_seed(cfg.master_seed, a_idx, n_idx, m_idx, _BOOTSTRAP_SALT)
                rows.append(summarize(SampleSet(values, label), seed=seed, resamples=resamples))
    return ExperimentResult(cfg, rows, samples)


def format_number(x) -> str:
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return ""
    if x == int(x) and abs(x) < 2**53:
        return str(int(x))
    return f"{x:.6f}".rstrip("0").rstrip(".")


def rows_to_csv(rows: Iterable[SummaryRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        alg, n, metric = r.label
        if r.failed:
            w.writerow([alg, n, metric, 0, 0, "failed", "", "", ""])
            continue
        w.writerow([alg, n, metric, r.count, r.outliers_removed,
                    format_number(r.median), format_number(r.ci_low),
                    format_number(r.ci_high), format_number(r.mean)])
    return buf.getvalue()


def write_csv(rows: Iterable[SummaryRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_to_csv(rows))


def read_csv(source) -> list[SummaryRow]:
    """Parse summary rows from a path or an open text stream."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8", newline="") as fh:
            return read_csv(fh)
    reader = csv.DictReader(source)
    if reader.fieldnames != CSV_COLUMNS:
        raise ConfigError(f"unexpected CSV header {reader.fieldnames}")
    rows = []
    for rec in reader:
        label = (rec["algorithm"], int(rec["n"]), rec["metric"])
        if rec["median"] == "failed":
            rows.append(SummaryRow.failed_cell(label))
            continue
        rows.append(SummaryRow(label, int(rec["count"]), float(rec["median"]),
                               float(rec["ci_low"]), float(rec["ci_high"]),
                               int(rec["outliers_removed"]), float(rec["mean"])))
    return rows


@dataclass(frozen=True)
class Comparison:
    algorithm: str
    n: int
    metric: str
    median: float
    baseline_median: float
    pct_change: float


COMPARISON_COLUMNS = ["algorithm", "n", "metric", "median", "baseline_median", "pct_change"]


def compare_to_baseline(rows: Sequence[SummaryRow], baseline: str) -> list[Comparison]:
    """Percentage change of every algorithm's median against ``baseline``.

    Cells with no usable baseline or value are skipped with a warning.
    """
    baseline = baseline.strip().lower()
    base = {(r.n, r.metric): r for r in rows if r.algorithm == baseline and not r.failed}
    if not any(r.algorithm == baseline for r in rows):
        raise ConfigError(f"baseline {baseline!r} not present in table")
    out = []
    for r in rows:
        b = base.get((r.n, r.metric))
        if r.failed or b is None:
            log.warning("skipping %s n=%s %s: missing cell", r.algorithm, r.n, r.metric)
            continue
        if b.median == 0:
            log.warning("skipping %s n=%s %s: zero baseline", r.algorithm, r.n, r.metric)
            continue
        out.append(Comparison(r.algorithm, r.n, r.metric, r.median, b.median,
                              pct_change(r.median, b.median)))
    return out


def comparisons_to_csv(comps: Iterable[Comparison]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COMPARISON_COLUMNS)
    for c in comps:
        w.writerow([c.algorithm, c.n, c.metric, format_number(c.median),
                    format_number(c.baseline_median), format_number(c.pct_change)])
    return buf.getvalue()


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(cfg, **kw)
