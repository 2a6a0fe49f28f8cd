import math

import numpy as np
import pytest

from hitwalk import harness
from hitwalk.harness import (
    CSV_COLUMNS,
    Thresholds,
    TrialBatch,
    TrialPlan,
    TrialRecord,
    empirical_summary,
    ks_distance,
    run_trials,
    trials_csv_text,
)


def strip_wall(csv_text: str) -> str:
    # wall_ms is the one deliberately volatile column
    return "\n".join(",".join(line.split(",")[:-1]) for line in csv_text.splitlines())


def test_ks_distance_self_test():
    rng = np.random.default_rng(5)
    samples = rng.normal(0.0, math.sqrt(1.3), size=10_000)
    assert ks_distance(samples, 1.3) < 0.02


def test_ks_distance_constant_samples():
    assert ks_distance(np.zeros(100), 1.0) == pytest.approx(0.5)


def test_ks_distance_affine_invariance():
    rng = np.random.default_rng(6)
    samples = rng.normal(0.0, 1.0, size=500)
    base = ks_distance(samples, 1.0)
    scaled = ks_distance(4.0 * samples, 16.0)
    assert scaled == base


def test_ks_distance_guards():
    with pytest.raises(ValueError):
        ks_distance(np.zeros(10), 1.0)
    with pytest.raises(ValueError):
        ks_distance(np.zeros(100), 0.0)


def _fake_batch(values, n=1000, remainders=None):
    remainders = remainders if remainders is not None else np.zeros(len(values))
    records = tuple(
        TrialRecord(
            trial_index=i,
            seed=i,
            n=n,
            p=0.1,
            attempts=1,
            h_i_exact=float(n),
            h_i_truncated=float(n),
            statistic_exact=float(v),
            statistic_truncated=float(v - r),
            un=float(v - r),
            remainder=float(r),
            wall_ms=0.0,
        )
        for i, (v, r) in enumerate(zip(values, remainders))
    )
    return TrialBatch(
        n=n, p=0.1, m_trials=len(records), master_seed=0, records=records, failures=()
    )


def test_empirical_summary_calibration_passes():
    rng = np.random.default_rng(11)
    target = 1.0 + 0.1 * 0.9 / 2.0
    draws = rng.normal(0.0, math.sqrt(target), size=2000)
    summary = empirical_summary(_fake_batch(draws), p_star=0.1)
    assert all(summary.pass_flags.values()), summary.pass_flags


def test_empirical_summary_negative_control_variance():
    rng = np.random.default_rng(12)
    target = 1.0 + 0.1 * 0.9 / 2.0
    draws = rng.normal(0.0, math.sqrt(2.0 * target), size=2000)
    summary = empirical_summary(_fake_batch(draws), p_star=0.1)
    assert not summary.pass_flags["variance"]


def test_empirical_summary_moment_stderrs():
    rng = np.random.default_rng(13)
    draws = rng.normal(0.0, 1.0, size=400)
    s = empirical_summary(_fake_batch(draws), p_star=0.0)
    assert s.mean_stderr == pytest.approx(math.sqrt(s.variance / 400))
    assert s.skewness_stderr == pytest.approx(math.sqrt(6 / 400))
    assert s.kurtosis_stderr == pytest.approx(math.sqrt(24 / 400))
    assert abs(s.skewness) < 4 * s.skewness_stderr
    assert abs(s.excess_kurtosis) < 4 * s.kurtosis_stderr


def test_empirical_summary_requires_records():
    empty = TrialBatch(
        n=10, p=0.2, m_trials=0, master_seed=0, records=(), failures=()
    )
    with pytest.raises(ValueError):
        empirical_summary(empty, p_star=0.2)


def test_run_trials_deterministic_and_finite():
    plan = TrialPlan(n=2, p=0.5, m_trials=10, master_seed=77)
    a = run_trials(plan)
    b = run_trials(plan)
    assert strip_wall(trials_csv_text(a)) == strip_wall(trials_csv_text(b))
    for r in a.records:
        assert r.h_i_exact > 0
        assert r.attempts >= 1
        assert all(
            math.isfinite(v)
            for v in (r.h_i_exact, r.statistic_exact, r.statistic_truncated, r.un)
        )


def test_run_trials_worker_count_invariance():
    base = TrialPlan(n=30, p=0.3, m_trials=8, master_seed=5, workers=1)
    two = TrialPlan(n=30, p=0.3, m_trials=8, master_seed=5, workers=2)
    ra = run_trials(base)
    rb = run_trials(two)
    assert strip_wall(trials_csv_text(ra)) == strip_wall(trials_csv_text(rb))


def test_run_trials_records_failures_without_crash():
    # hopeless connectivity regime: every trial fails, batch kept only
    # because the failure cap is lifted
    plan = TrialPlan(
        n=49, p=0.01, m_trials=3, master_seed=9, max_attempts=3, max_failure_fraction=1.0
    )
    batch = run_trials(plan)
    assert len(batch.failures) == 3 and not batch.records
    assert all("connectivity" in f.reason for f in batch.failures)


def test_run_trials_aborts_on_failure_fraction():
    plan = TrialPlan(n=49, p=0.01, m_trials=3, master_seed=9, max_attempts=3)
    with pytest.raises(RuntimeError):
        run_trials(plan)


def test_csv_schema():
    plan = TrialPlan(n=2, p=0.5, m_trials=2, master_seed=1)
    text = trials_csv_text(run_trials(plan))
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 3
    first = lines[1].split(",")
    assert first[0] == "0" and first[2] == "2"
    float(first[5])  # h_i_exact parses


def test_histogram_file(tmp_path):
    values = np.linspace(-2, 2, 101)
    path = tmp_path / "hist.csv"
    harness.write_histogram_csv(values, path, bins=10)
    lines = path.read_text().splitlines()
    assert lines[0] == "bin_left,bin_right,count"
    assert len(lines) == 11
    counts = [int(line.split(",")[2]) for line in lines[1:]]
    assert sum(counts) == 101


def test_summary_json(tmp_path):
    rng = np.random.default_rng(3)
    summary = empirical_summary(_fake_batch(rng.normal(0, 1, 200)), p_star=0.0)
    path = tmp_path / "summary.json"
    harness.write_summary_json(summary, path)
    import json

    loaded = json.loads(path.read_text())
    assert loaded["m_trials"] == 200
    assert set(loaded["pass_flags"]) == {
        "ks", "mean", "variance", "lln", "skewness", "kurtosis",
    }


def test_thresholds_are_tunable():
    rng = np.random.default_rng(14)
    draws = rng.normal(0.0, 1.0, size=500)
    tight = Thresholds(mean_max=1e-9)
    summary = empirical_summary(_fake_batch(draws), p_star=0.0, thresholds=tight)
    assert not summary.pass_flags["mean"]
