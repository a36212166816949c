"""Monte Carlo comparison of BSD against MRD and the p-value baselines."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .baselines import adaptive_bh, bh_step_up, bonferroni, by_step_up, two_sided_pvalues
from .bsd import bsd_step_down
from .estimators import EstimatorConfig, estimate_params
from .model import (
    COVARIANCE_KINDS,
    CovarianceFamily,
    GroundTruth,
    MixtureParams,
    build_covariance,
    noise_transform,
    sample_dataset,
)
from .mrd import default_critical_sequence, mrd_step_down

__all__ = [
    "METHODS",
    "METRICS",
    "ExperimentConfig",
    "MetricRow",
    "MetricsReport",
    "score_replicate",
    "run_replicate",
    "run_experiment",
    "emit_report",
    "report_to_csv",
    "report_to_json",
]

log = logging.getLogger(__name__)

METHODS = ("bsd", "mrd", "bh", "by", "bonf", "abh")
METRICS = ("misclassification", "fdr", "fnr", "power", "rejections")
CSV_HEADER = ("method", "metric", "estimate", "std_error", "replicates")


@dataclass
class ExperimentConfig:
    m: int = 100
    cov: str = "identity"
    rho: float = 0.0
    block_size: int = 1
    sigma_file: Optional[str] = None
    p: float = 0.1
    v: float = 16.0
    delta: float = 1.0
    alpha: float = 0.05
    gamma: float = 0.25
    methods: list = field(default_factory=lambda: list(METHODS))
    estimate_params: bool = False
    reps: int = 100
    seed: int = 0
    workers: int = 1
    keep_replicates: bool = False

    def validate(self) -> None:
        """Raise ValueError naming the offending field."""

        def bad(name, msg):
            raise ValueError(f"{name}: {msg}")

        if not isinstance(self.m, int) or self.m < 1:
            bad("m", "must be a positive integer")
        if self.cov not in COVARIANCE_KINDS:
            bad("cov", f"must be one of {', '.join(COVARIANCE_KINDS)}")
        if not 0.0 < self.p < 1.0:
            bad("p", "must lie in (0, 1)")
        if not self.v > 0:
            bad("v", "must be positive")
        if not self.delta > 0:
            bad("delta", "must be positive")
        if not 0.0 <= self.alpha < 1.0:
            bad("alpha", "must lie in [0, 1)")
        if not 0.0 < self.gamma < 0.5:
            bad("gamma", "must lie in (0, 1/2)")
        unknown = [mth for mth in self.methods if mth not in METHODS]
        if unknown:
            bad("methods", f"unknown {unknown}; choose from {', '.join(METHODS)}")
        if "mrd" in self.methods and not self.alpha > 0:
            bad("alpha", "mrd needs alpha > 0")
        if not isinstance(self.reps, int) or self.reps < 1:
            bad("reps", "must be at least 1")
        if self.workers < 1:
            bad("workers", "must be at least 1")
        try:
            self.family()
        except ValueError as exc:
            bad("cov", str(exc))

    def family(self) -> CovarianceFamily:
        return CovarianceFamily(self.cov, self.m, self.rho, self.block_size, self.sigma_file)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("workers")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


def score_replicate(decisions, truth) -> tuple[int, int, int, int]:
    """Confusion counts ``(tp, fp, tn, fn)`` of boolean rejections against ``nu``."""
    nu = truth.nu if isinstance(truth, GroundTruth) else truth
    d = np.asarray(decisions, dtype=bool)
    nu = np.asarray(nu).astype(bool)
    if d.shape != nu.shape:
        raise ValueError(f"decisions have length {d.size}, truth has {nu.size}")
    tp = int(np.sum(d & nu))
    fp = int(np.sum(d & ~nu))
    fn = int(np.sum(~d & nu))
    return tp, fp, d.size - tp - fp - fn, fn


def _rates(tp, fp, tn, fn) -> dict:
    m = tp + fp + tn + fn
    r = tp + fp
    return {
        "misclassification": (fp + fn) / m,
        "fdr": fp / max(r, 1),
        "fnr": fn / max(m - r, 1),
        "power": tp / max(tp + fn, 1),
        "rejections": float(r),
    }


def run_replicate(cfg: ExperimentConfig, replicate: int, transform=None, sigma=None) -> dict:
    """Sample one dataset and return confusion counts per method."""
    fam = cfg.family()
    true_params = MixtureParams(cfg.p, cfg.v, cfg.delta)
    truth, x = sample_dataset(fam, true_params, cfg.seed, replicate, transform)
    est = None
    if cfg.estimate_params or "abh" in cfg.methods:
        est = estimate_params(x, EstimatorConfig(gamma=cfg.gamma))
    cov = fam if (sigma is None or fam.is_intraclass) else sigma
    pv = None
    out = {}
    for method in cfg.methods:
        if method == "bsd":
            params = MixtureParams(est["p"], est["v"], cfg.delta) if cfg.estimate_params else true_params
            dec, _ = bsd_step_down(x, cov, params)
        elif method == "mrd":
            dec, _ = mrd_step_down(x, cov, default_critical_sequence(cfg.m, cfg.alpha))
        else:
            if pv is None:
                pv = two_sided_pvalues(x)
            if method == "bh":
                dec = bh_step_up(pv, cfg.alpha)
            elif method == "by":
                dec = by_step_up(pv, cfg.alpha)
            elif method == "bonf":
                dec = bonferroni(pv, cfg.alpha)
            else:
                dec = adaptive_bh(pv, cfg.alpha, est["p"])
        out[method] = score_replicate(dec, truth)
    return out


def _run_chunk(cfg: ExperimentConfig, reps: Sequence[int]) -> list:
    fam = cfg.family()
    transform = noise_transform(fam)
    sigma = None
    if not fam.is_intraclass and ({"bsd", "mrd"} & set(cfg.methods)):
        sigma = build_covariance(fam)
    return [(r, run_replicate(cfg, r, transform, sigma)) for r in reps]


@dataclass(frozen=True)
class MetricRow:
    method: str
    metric: str
    estimate: float
    std_error: float
    replicates: int


@dataclass
class MetricsReport:
    config: dict
    rows: list
    version: str = __version__
    replicate_counts: Optional[list] = None

    def get(self, method: str, metric: str) -> MetricRow:
        for row in self.rows:
            if row.method == method and row.metric == metric:
                return row
        raise KeyError((method, metric))

    def to_dict(self) -> dict:
        d = {
            "version": self.version,
            "config": self.config,
            "metrics": [asdict(r) for r in self.rows],
        }
        if self.replicate_counts is not None:
            d["replicates"] = self.replicate_counts
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        return cls(
            config=d["config"],
            rows=[MetricRow(**r) for r in d["metrics"]],
            version=d["version"],
            replicate_counts=d.get("replicates"),
        )


def _mean_se(values: list) -> tuple[float, float]:
    # fsum is exactly rounded, so the result does not depend on replicate order
    n = len(values)
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var / n)


def aggregate(cfg: ExperimentConfig, results: list) -> MetricsReport:
    results = sorted(results, key=lambda item: item[0])
    rows = []
    for method in cfg.methods:
        per_rep = [_rates(*counts[method]) for _, counts in results]
        for metric in METRICS:
            mean, se = _mean_se([r[metric] for r in per_rep])
            rows.append(MetricRow(method, metric, mean, se, len(per_rep)))
    counts = None
    if cfg.keep_replicates:
        counts = [
            {"replicate": r, **{mth: list(c[mth]) for mth in cfg.methods}} for r, c in results
        ]
    return MetricsReport(config=cfg.to_dict(), rows=rows, replicate_counts=counts)


def run_experiment(cfg: ExperimentConfig) -> MetricsReport:
    """Run ``cfg.reps`` replicates (optionally across processes) and aggregate.

    Replicate ``r`` draws from its own stream keyed by ``(seed, r)``, so the
    report is identical for any worker count.
    """
    cfg.validate()
    start = time.perf_counter()
    reps = list(range(cfg.reps))
    if cfg.workers == 1 or cfg.reps == 1:
        results = _run_chunk(cfg, reps)
    else:
        chunks = [reps[i :: cfg.workers] for i in range(cfg.workers)]
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = [item for part in pool.map(_run_chunk, [cfg] * len(chunks), chunks) for item in part]
    log.info("ran %d replicates in %.2fs", cfg.reps, time.perf_counter() - start)
    return aggregate(cfg, results)


def report_to_csv(report: MetricsReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in report.rows:
        writer.writerow([r.method, r.metric, repr(r.estimate), repr(r.std_error), r.replicates])
    return buf.getvalue()


def report_to_json(report: MetricsReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"


def emit_report(report: MetricsReport, path, fmt: str = "csv") -> None:
    """Write the report to ``path`` (``"-"`` for standard output)."""
    if fmt == "csv":
        text = report_to_csv(report)
    elif fmt == "json":
        text = report_to_json(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if str(path) == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {os.fspath(path)}: {exc.strerror}") from exc
