"""Monte Carlo campaigns over graph realizations and their statistical summaries.

Trials are keyed by (master seed, trial index): each trial derives its own
seed, so the record multiset is independent of worker count and scheduling.
Workers always run in spawned single-BLAS-thread processes (the parent pins
the thread env vars before the pool starts), which keeps eigensolver output
bit-identical whether the pool has 1 worker or 8.
"""

from __future__ import annotations

import csv
import io
import json
import math
import multiprocessing as mp
import os
from dataclasses import dataclass, field, asdict
from functools import lru_cache
from pathlib import Path
from time import perf_counter

import numpy as np
from scipy.special import ndtr

from .graphs import ConnectivityError, sample_connected_er
from .moments import MomentSet, moment_set
from .rng import derived_seed
from .ustat import standardized_hitting, statistic_un

__all__ = [
    "TrialPlan",
    "TrialRecord",
    "TrialFailure",
    "TrialBatch",
    "run_trials",
    "run_single_trial",
    "ks_distance",
    "Thresholds",
    "CltSummary",
    "empirical_summary",
    "write_trials_csv",
    "trials_csv_text",
    "write_summary_json",
    "write_histogram_csv",
]

CSV_COLUMNS = (
    "trial", "seed", "n", "p", "attempts",
    "h_i_exact", "h_i_truncated", "stat_exact", "stat_truncated",
    "un", "remainder", "wall_ms",
)


@dataclass(frozen=True)
class TrialPlan:
    n: int
    p: float
    m_trials: int
    master_seed: int
    workers: int = 1
    max_attempts: int = 1000
    max_failure_fraction: float = 0.1

    def validate(self) -> None:
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie strictly inside (0, 1), got {self.p}")
        if self.m_trials < 1:
            raise ValueError("m_trials must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    seed: int
    n: int
    p: float
    attempts: int
    h_i_exact: float
    h_i_truncated: float
    statistic_exact: float
    statistic_truncated: float
    un: float
    remainder: float
    wall_ms: float


@dataclass(frozen=True)
class TrialFailure:
    trial_index: int
    seed: int
    reason: str


@dataclass(frozen=True)
class TrialBatch:
    n: int
    p: float
    m_trials: int
    master_seed: int
    records: tuple[TrialRecord, ...]
    failures: tuple[TrialFailure, ...]


@lru_cache(maxsize=32)
def _cached_moments(n: int, p: float) -> MomentSet:
    return moment_set(n, p)


def run_single_trial(
    trial_index: int, trial_seed: int, n: int, p: float, max_attempts: int = 1000
) -> TrialRecord | TrialFailure:
    """One trial: sample a connected graph, evaluate both statistic modes and Un."""
    start = perf_counter()
    try:
        g = sample_connected_er(n + 1, p, trial_seed, max_attempts=max_attempts)
    except ConnectivityError as exc:
        return TrialFailure(trial_index=trial_index, seed=trial_seed, reason=str(exc))
    mom = _cached_moments(n, p)
    sv = standardized_hitting(g, mom, mode="exact")
    un = statistic_un(g, mom).value
    comp = sv.components
    return TrialRecord(
        trial_index=trial_index,
        seed=trial_seed,
        n=n,
        p=p,
        attempts=g.attempts,
        h_i_exact=comp["h_i_exact"],
        h_i_truncated=comp["h_i_truncated"],
        statistic_exact=comp["statistic_exact"],
        statistic_truncated=comp["statistic_truncated"],
        un=un,
        remainder=comp["remainder"],
        wall_ms=(perf_counter() - start) * 1000.0,
    )


def _worker(args) -> TrialRecord | TrialFailure:
    return run_single_trial(*args)


def trial_seed_for(master_seed: int, trial_index: int) -> int:
    return derived_seed(master_seed, "trial", trial_index)


def run_trials(plan: TrialPlan) -> TrialBatch:
    """Run plan.m_trials independent trials; scheduling never affects results."""
    plan.validate()
    tasks = [
        (t, trial_seed_for(plan.master_seed, t), plan.n, plan.p, plan.max_attempts)
        for t in range(plan.m_trials)
    ]
    # Keep worker BLAS configuration identical regardless of pool size so the
    # eigensolver output does not depend on how many workers share the machine.
    for var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, "1")
    try:
        # fork keeps run_trials usable from REPL/stdin parents
        ctx = mp.get_context("fork")
    except ValueError:
        ctx = mp.get_context("spawn")
    with ctx.Pool(processes=plan.workers) as pool:
        results = list(pool.imap_unordered(_worker, tasks, chunksize=1))
    records = sorted(
        (r for r in results if isinstance(r, TrialRecord)), key=lambda r: r.trial_index
    )
    failures = sorted(
        (r for r in results if isinstance(r, TrialFailure)), key=lambda r: r.trial_index
    )
    if len(failures) > plan.max_failure_fraction * plan.m_trials:
        raise RuntimeError(
            f"{len(failures)} of {plan.m_trials} trials failed connectivity "
            f"(> {plan.max_failure_fraction:.0%}); aborting batch"
        )
    return TrialBatch(
        n=plan.n,
        p=plan.p,
        m_trials=plan.m_trials,
        master_seed=plan.master_seed,
        records=tuple(records),
        failures=tuple(failures),
    )


# ---------------------------------------------------------------------------
# goodness of fit & summaries
# ---------------------------------------------------------------------------


def ks_distance(samples, target_variance: float) -> float:
    """Sup distance between the empirical CDF and the centered normal CDF
    with the given variance, by the order-statistic formula."""
    x = np.sort(np.asarray(samples, dtype=np.float64))
    if x.size < 30:
        raise ValueError(f"need at least 30 samples, got {x.size}")
    if target_variance <= 0:
        raise ValueError("target_variance must be positive")
    cdf = ndtr(x / math.sqrt(target_variance))
    m = x.size
    upper = np.arange(1, m + 1) / m - cdf
    lower = cdf - np.arange(0, m) / m
    return float(max(upper.max(), lower.max()))


@dataclass(frozen=True)
class Thresholds:
    """Pass/fail tolerances; defaults are the acceptance-suite values."""

    ks_max: float = 0.10
    mean_max: float = 0.15
    variance_bracket: tuple[float, float] = (0.8, 1.3)
    lln_bracket: tuple[float, float] = (0.97, 1.06)
    skewness_max: float = 0.35
    kurtosis_max: float = 0.7


@dataclass(frozen=True)
class CltSummary:
    m_trials: int
    mode: str
    p_star: float
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    mean_stderr: float
    variance_stderr: float
    skewness_stderr: float
    kurtosis_stderr: float
    ks_distance: float
    target_variance: float
    lln_ratio: float
    remainder_median: float
    connectivity_acceptance: float
    failed_trials: int
    pass_flags: dict[str, bool] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        # strict-JSON friendliness: NaN (ks on tiny batches) becomes null
        for key, value in out.items():
            if isinstance(value, float) and math.isnan(value):
                out[key] = None
        return out


def empirical_summary(
    batch: TrialBatch,
    p_star: float,
    mode: str = "exact",
    thresholds: Thresholds | None = None,
) -> CltSummary:
    """Moments, KS distance and pass flags of one batch's statistic samples."""
    if not batch.records:
        raise ValueError("batch has no successful records")
    if mode not in ("exact", "truncated"):
        raise ValueError(f"mode must be 'exact' or 'truncated', got {mode!r}")
    th = thresholds or Thresholds()
    values = np.array(
        [r.statistic_exact if mode == "exact" else r.statistic_truncated for r in batch.records]
    )
    m = values.size
    mean = float(values.mean())
    variance = float(values.var(ddof=1)) if m > 1 else 0.0
    sd = math.sqrt(variance) if variance > 0 else 0.0
    centered = values - mean
    if sd > 0:
        skewness = float(np.mean(centered**3)) / sd**3
        excess_kurtosis = float(np.mean(centered**4)) / sd**4 - 3.0
    else:
        skewness = 0.0
        excess_kurtosis = 0.0
    target_variance = 1.0 + p_star * (1.0 - p_star) / 2.0
    ks = ks_distance(values, target_variance) if m >= 30 else float("nan")
    lln_ratio = float(np.mean([r.h_i_exact / r.n for r in batch.records]))
    remainder_median = float(np.median([abs(r.remainder) for r in batch.records]))
    total_attempts = sum(r.attempts for r in batch.records)
    lo, hi = th.variance_bracket
    flags = {
        "ks": bool(ks <= th.ks_max) if not math.isnan(ks) else False,
        "mean": abs(mean) <= th.mean_max,
        "variance": lo * target_variance <= variance <= hi * target_variance,
        "lln": th.lln_bracket[0] <= lln_ratio <= th.lln_bracket[1],
        "skewness": abs(skewness) <= th.skewness_max,
        "kurtosis": abs(excess_kurtosis) <= th.kurtosis_max,
    }
    return CltSummary(
        m_trials=m,
        mode=mode,
        p_star=float(p_star),
        mean=mean,
        variance=variance,
        skewness=skewness,
        excess_kurtosis=excess_kurtosis,
        mean_stderr=sd / math.sqrt(m),
        variance_stderr=variance * math.sqrt(2.0 / max(m - 1, 1)),
        skewness_stderr=math.sqrt(6.0 / m),
        kurtosis_stderr=math.sqrt(24.0 / m),
        ks_distance=ks,
        target_variance=target_variance,
        lln_ratio=lln_ratio,
        remainder_median=remainder_median,
        connectivity_acceptance=len(batch.records) / max(total_attempts, 1),
        failed_trials=len(batch.failures),
        pass_flags=flags,
    )


# ---------------------------------------------------------------------------
# file output (17 significant digits; wall_ms is the one volatile column)
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def trials_csv_text(batch: TrialBatch) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in batch.records:
        writer.writerow(
            [
                r.trial_index,
                r.seed,
                r.n,
                _fmt(r.p),
                r.attempts,
                _fmt(r.h_i_exact),
                _fmt(r.h_i_truncated),
                _fmt(r.statistic_exact),
                _fmt(r.statistic_truncated),
                _fmt(r.un),
                _fmt(r.remainder),
                _fmt(r.wall_ms),
            ]
        )
    return buf.getvalue()


def write_trials_csv(batch: TrialBatch, path: str | Path) -> None:
    Path(path).write_text(trials_csv_text(batch))


def write_summary_json(summary: CltSummary, path: str | Path) -> None:
    Path(path).write_text(json.dumps(summary.to_dict(), indent=2) + "\n")


def write_histogram_csv(values, path: str | Path, bins: int = 40) -> None:
    values = np.asarray(values, dtype=np.float64)
    counts, edges = np.histogram(values, bins=bins)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["bin_left", "bin_right", "count"])
        for left, right, count in zip(edges[:-1], edges[1:], counts):
            writer.writerow([_fmt(left), _fmt(right), int(count)])
