import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hitwalk import moments, ustat
from hitwalk.graphs import ConnectivityError, from_adjacency, sample_connected_er, sample_er
from hitwalk.moments import binomial_pmf, moment_set
from hitwalk.rng import derived_seed
from hitwalk.ustat import (
    condition_diagnostics,
    draw_synthetic_sample,
    hoeffding_split,
    kernel_h,
    limit_variance,
    standardized_hitting,
    statistic_un,
    synthetic_statistics,
    tn_second_moment_formula,
)

P3 = from_adjacency(np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]]), p=0.5)


def test_kernel_values_and_symmetry():
    mu = 0.3
    assert kernel_h(0, 0, mu) == pytest.approx(1 - mu * mu, abs=1e-16)
    rng = np.random.default_rng(0)
    x = rng.integers(0, 100, 50)
    y = rng.integers(0, 100, 50)
    assert np.array_equal(kernel_h(x, y, mu), kernel_h(y, x, mu))


def test_kernel_centering_exact_double_sum():
    n, p = 50, 0.3
    mu = moments.inverse_moment(n, p, 1)
    w = binomial_pmf(n - 1, p)
    xs = np.arange(n)
    vals = kernel_h(xs[:, None], xs[None, :], mu)
    total = float(np.sum(np.outer(w, w) * vals))
    assert abs(total) < 1e-12


def test_hoeffding_zero_mask():
    parts = hoeffding_split(3, 7, 0, 0.2)
    assert parts == (0.0, 0.0, 0.0, 0.0)


@settings(max_examples=100, deadline=None)
@given(
    st.integers(min_value=0, max_value=3000),
    st.integers(min_value=0, max_value=3000),
    st.integers(min_value=0, max_value=1),
    st.floats(min_value=1e-4, max_value=0.9999),
)
def test_hoeffding_identity_property(x_i, x_j, z, mu):
    parts = hoeffding_split(x_i, x_j, z, mu)
    gap = parts.phi - (parts.psi_ji + parts.psi_ij + parts.phi_tilde)
    assert abs(gap) <= 1e-15


def test_hoeffding_conditional_centering():
    # E[phi_tilde | X_i = a, Z = 1] = 0 by exact summation over X_j
    n, p = 60, 0.25
    mu = moments.inverse_moment(n, p, 1)
    w = binomial_pmf(n - 1, p)
    xs = np.arange(n)
    for a in (0, 5, n - 1):
        parts = hoeffding_split(np.full(n, a), xs, np.ones(n), mu)
        assert abs(float(np.sum(w * parts.phi_tilde))) < 1e-12


def test_phi_tilde_second_moment_identity():
    n, p = 50, 0.3
    mom = moment_set(n, p)
    w = binomial_pmf(n - 1, p)
    dev = 1.0 / (np.arange(n) + 1.0) - mom.mu
    exact = p * float(np.sum(np.outer(w, w) * np.outer(dev, dev) ** 2))
    assert exact == pytest.approx(mom.tilde_phi_second, rel=1e-10)


def test_synthetic_sample_invariants():
    s = draw_synthetic_sample(40, 0.2, 9)
    assert np.array_equal(s.z, s.z.T)
    assert (np.diag(s.z) == 0).all()
    assert s.x.min() >= 0 and s.x.max() <= 39
    assert s.x.shape == (41,)


def test_synthetic_identity_direct_form():
    n, p = 100, 0.2
    mom = moment_set(n, p)
    stats = synthetic_statistics(n, p, mom, seed=31)
    assert abs(stats.vn_plus_zn - stats.vn_plus_zn_direct) <= 1e-12


def test_synthetic_forced_full_mask_near_one():
    # with every pair selected and p ~ 1, the mask centering collapses
    n = 100
    p = 1 - 1e-12
    mom = moment_set(n, p)
    base = draw_synthetic_sample(n, p, 5)
    z = np.ones_like(base.z)
    np.fill_diagonal(z, 0)
    forced = ustat.SyntheticSample(x=base.x, z=z, seed=base.seed)
    stats = synthetic_statistics(n, p, mom, sample=forced)
    assert abs(stats.zn) < 1e-3


def test_synthetic_vn_variance_near_one():
    n, p, m = 400, 0.2, 2000
    mom = moment_set(n, p)
    vals = np.empty(m)
    for t in range(m):
        vals[t] = synthetic_statistics(n, p, mom, seed=derived_seed(77, "vn", t)).vn
    assert 0.8 <= vals.var(ddof=1) <= 1.2


def test_sum_variance_matches_n2_theta2():
    # variance of the unnormalized masked pair sum is ~ n^2 theta^2
    n, p, m = 400, 0.2, 1200
    mom = moment_set(n, p)
    vals = np.empty(m)
    for t in range(m):
        st_ = synthetic_statistics(n, p, mom, seed=derived_seed(78, "norm", t))
        vals[t] = st_.vn * n * mom.theta
    ratio = vals.var(ddof=1) / (n * n * mom.theta2)
    assert 0.8 <= ratio <= 1.2


def test_statistic_un_consistency_rearranged():
    g = sample_connected_er(80, 0.3, seed=2)
    mom = moment_set(79, 0.3)
    un = statistic_un(g, mom)
    n = 79
    lhs = un.value * n * mom.theta + un.components["centering"]
    assert lhs == pytest.approx(un.components["pair_sum"], abs=1e-10)


def test_statistic_un_mean_near_zero():
    n, p, m = 400, 0.2, 500
    mom = moment_set(n, p)
    vals = np.empty(m)
    for t in range(m):
        g = sample_connected_er(n + 1, p, derived_seed(80, "un", t))
        vals[t] = statistic_un(g, mom).value
    stderr = vals.std(ddof=1) / math.sqrt(m)
    assert abs(vals.mean()) <= 4 * stderr


def test_statistic_un_rejects_disconnected():
    bad = from_adjacency(
        np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]), p=0.3
    )
    with pytest.raises(ConnectivityError):
        statistic_un(bad, moment_set(3, 0.3))


def test_statistic_domain_guard_p_one():
    with pytest.raises(ValueError):
        sample_er(4, 1.0, 0)


def test_moment_mismatch_rejected():
    g = sample_connected_er(30, 0.3, seed=1)
    with pytest.raises(ValueError):
        statistic_un(g, moment_set(29, 0.2))
    with pytest.raises(ValueError):
        standardized_hitting(g, moment_set(50, 0.3))


def test_standardized_hitting_p3_pinned():
    mom = moment_set(2, 0.5)
    sv = standardized_hitting(P3, mom, mode="exact")
    assert sv.components["h_i_exact"] == pytest.approx(1.5, abs=1e-12)
    # frozen regression value: (1.5 - 0 - 1.6875) / (4 * sqrt(0.0361328125))
    assert sv.value == pytest.approx(-0.24659848095803566, rel=1e-12)
    tv = standardized_hitting(P3, mom, mode="truncated")
    assert tv.value == pytest.approx(
        sv.components["statistic_truncated"], rel=1e-15
    )
    assert sv.components["remainder"] == pytest.approx(
        sv.value - tv.value, rel=1e-12
    )


def test_standardized_hitting_exact_vs_truncated_decay():
    # the spectral-tail gap shrinks with n in median
    p = 0.1
    gaps = {}
    for n, reps in ((250, 10), (1000, 6)):
        mom = moment_set(n, p)
        vals = []
        for t in range(reps):
            g = sample_connected_er(n + 1, p, derived_seed(81, "gap", n, t))
            sv = standardized_hitting(g, mom)
            vals.append(abs(sv.components["remainder"]))
        gaps[n] = float(np.median(vals))
    assert gaps[1000] < gaps[250]


def test_condition_diagnostics_finite_nonnegative():
    n, p = 200, 0.2
    mom = moment_set(n, p)
    diag = condition_diagnostics(n, p, mom, eps=0.5, mc_samples=20000, seed=3)
    for value in (diag.c1, diag.c2, diag.c3, diag.c4):
        assert math.isfinite(value) and value >= 0.0
    assert diag.c1_stderr >= 0.0


def test_condition_diagnostics_decay_scan():
    p = 0.2
    c1n, c4np = {}, {}
    for n in (200, 400, 800):
        mom = moment_set(n, p)
        d = condition_diagnostics(n, p, mom, eps=0.5, mc_samples=20000, seed=4)
        c1n[n] = d.c1 * n
        c4np[n] = d.c4 * n * p
    for n in (400, 800):
        assert c1n[n] <= 2 * c1n[200] + 1e-18
        assert c4np[n] <= 2 * c4np[200] + 1e-18


def test_condition_diagnostics_warns_small_mc():
    n, p = 100, 0.2
    mom = moment_set(n, p)
    with pytest.warns(UserWarning):
        condition_diagnostics(n, p, mom, mc_samples=100, seed=0)


def test_limit_variance_values():
    mom = moment_set(100, 0.3)
    assert limit_variance(0.0, 100, 0.3, mom).target_var == 1.0
    assert limit_variance(0.5, 100, 0.3, mom).target_var == 1.125
    mom2 = moment_set(2000, 0.1)
    lv = limit_variance(0.1, 2000, 0.1, mom2)
    target = math.sqrt(0.1 * 0.9 / 2)
    assert abs(lv.prelimit_ratio - target) / target < 0.05


def test_tn_second_moment_formula():
    for n in (1000, 2000):
        mom = moment_set(n, 0.1)
        assert 0.95 <= tn_second_moment_formula(n, mom) <= 1.05


def test_moment_boundedness_scan():
    # E[(Vn+Zn)^2] and E[(Vn+Zn)^4] stay bounded across n
    p, m = 0.2, 300
    by_n = {}
    for n in (200, 400, 800):
        mom = moment_set(n, p)
        vals = np.empty(m)
        for t in range(m):
            vals[t] = synthetic_statistics(
                n, p, mom, seed=derived_seed(82, "bound", n, t)
            ).vn_plus_zn
        by_n[n] = (float(np.mean(vals**2)), float(np.mean(vals**4)))
    base2, base4 = by_n[200]
    for n in (400, 800):
        m2, m4 = by_n[n]
        assert 0.5 * base2 <= m2 <= 2.0 * base2
        assert 0.5 * base4 <= m4 <= 2.0 * base4
