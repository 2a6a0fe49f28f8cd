import math

import numpy as np
import pytest

from hitwalk.moments import (
    binomial_pmf,
    central_moment,
    centered_inverse_moment,
    inverse_moment,
    inverse_moment_asymptotic,
    moment_set,
    mu_closed_form,
    shifted_inverse_moment,
)

def test_inverse_moment_hand_values():
    # Bin(3, 1/2): (1/8)(1 + 3/2 + 1 + 1/4)
    assert inverse_moment(4, 0.5, 1) == pytest.approx(0.46875, rel=0, abs=1e-15)
    # Bin(1, 1/2): (1/2)(1) + (1/2)(1/4)
    assert inverse_moment(2, 0.5, 2) == pytest.approx(0.625, rel=0, abs=1e-15)

def test_mu_closed_form_matches_sum_on_grid():
    for n in (10, 100, 1000, 5000):
        for p in (0.01, 0.1, 0.5, 0.9):
            closed = mu_closed_form(n, p)
            direct = inverse_moment(n, p, 1)
            assert abs(closed - direct) / closed < 1e-13

def test_mu_degenerate_limit_and_bound():
    n = 50
    assert mu_closed_form(n, 1 - 1e-12) == pytest.approx(1.0 / n, rel=1e-9)
    for n in (10, 200, 3000):
        for p in (0.05, 0.4, 0.95):
            assert mu_closed_form(n, p) <= 1.0 / (n * p)

def test_inverse_moment_monotone_in_r_and_p():
    for n, p in ((50, 0.2), (300, 0.5)):
        vals = [inverse_moment(n, p, r) for r in range(1, 9)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
    for r in (1, 2, 4):
        vals = [inverse_moment(200, p, r) for p in (0.05, 0.1, 0.3, 0.6, 0.9)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

def test_inverse_moment_domain_guards():
    with pytest.raises(ValueError):
        inverse_moment(100, 0.2, 9)
    with pytest.raises(ValueError):
        inverse_moment(100, 0.0, 1)
    with pytest.raises(ValueError):
        inverse_moment(1, 0.3, 1)

def test_asymptotic_two_term_accuracy():
    # exact/asymptotic - 1 = O((np)^-2); at np = 100 that is well below 5e-3
    exact = inverse_moment(1001, 0.1, 2)
    asym = inverse_moment_asymptotic(1001, 0.1, 2)
    assert abs(exact / asym - 1.0) < 5e-3

def test_asymptotic_residual_scaling():
    p = 0.1
    for r in (2, 3):
        scaled = []
        for np_target in (50, 100, 200, 400):
            n = int(round(np_target / p))
            scaled.append(
                abs(inverse_moment(n, p, r) - inverse_moment_asymptotic(n, p, r))
                * (n * p) ** (r + 2)
            )
        for a, b in zip(scaled, scaled[1:]):
            assert 0.5 <= a / b <= 2.0

def test_asymptotic_p_to_one_drops_correction():
    n, p = 100, 1 - 1e-12
    assert inverse_moment_asymptotic(n, p, 2) == pytest.approx((n * p) ** -2, rel=1e-9)

def test_asymptotic_regime_guard():
    with pytest.raises(ValueError):
        inverse_moment_asymptotic(50, 0.1, 2)
    with pytest.raises(ValueError):
        inverse_moment_asymptotic(1000, 0.1, 1)

def test_moment_set_identities():
    mom = moment_set(300, 0.25)
    assert mom.gamma2 == pytest.approx(mom.p * mom.mu**2 * (mom.sigma2 - mom.mu**2), rel=1e-15)
    assert mom.beta2 == pytest.approx(
        mom.p * (mom.sigma2 - mom.mu**2) * (mom.sigma2 + mom.mu**2), rel=1e-12
    )
    assert mom.theta2 == pytest.approx(300 * 0.25 * mom.gamma2 + mom.beta2 / 2, rel=1e-15)
    assert mom.alpha2 == pytest.approx(300 * mom.tilde_gamma2 + mom.tilde_beta2 / 2, rel=1e-15)
    assert mom.tilde_phi_second == pytest.approx(mom.beta2 - 2 * mom.gamma2, rel=1e-15)
    assert mom.sigma2 > mom.mu**2 > 0
    assert mom.gamma2 > 0 and mom.beta2 > 0
    assert mom.theta2 >= 300 * 0.25 * mom.gamma2
    assert mom.tilde_phi_second >= 0

def test_moment_set_order_diagnostics():
    mom = moment_set(1000, 0.1)
    assert 0.5 <= mom.gamma2_scaled <= 3.0
    assert 0.5 <= mom.beta2_scaled <= 3.0

def test_variance_expansion_ratio():
    # sigma2 - mu^2 ~ (1-p)/(np)^3 at np >= 100
    for n, p in ((1000, 0.1), (2000, 0.05), (500, 0.2)):
        mom = moment_set(n, p)
        ratio = (mom.sigma2 - mom.mu**2) * (n * p) ** 3 / (1 - p)
        assert 0.9 <= ratio <= 1.1

def test_theta_dominated_by_np_gamma():
    mom = moment_set(2000, 0.1)
    assert mom.beta2 / (2 * 2000 * 0.1 * mom.gamma2) <= 0.05

def test_asymptotic_insensitivity_to_removed_vertices():
    # removing l vertices and shifting by K barely moves the inverse moments
    for n, p in ((1000, 0.1), (500, 0.5)):
        np_ = n * p
        lo, hi = 1 - 10 / np_, 1 + 10 / np_
        for K in range(4):
            for l in range(4):
                for k in (1, 2):
                    ratio = shifted_inverse_moment(n - 1 - l, p, k, shift=K + 1) * np_**k
                    assert lo <= ratio <= hi

def test_central_moment_values():
    value, _ = central_moment(100, 0.3, 2)
    assert value == pytest.approx(99 * 0.3 * 0.7, rel=1e-12)
    value, _ = central_moment(3, 0.5, 4)
    assert value == pytest.approx(0.5, rel=1e-14)
    with pytest.raises(ValueError):
        central_moment(100, 0.3, 3)

def test_central_moment_ratio_bounded():
    ratios = [central_moment(n, 0.1, 4)[1] for n in (100, 400, 1600)]
    for r in ratios:
        assert 1.0 <= r <= 4.0  # fourth-moment ratio tends to 3

def test_centered_inverse_moment():
    value, _ = centered_inverse_moment(50, 0.3, 1)
    assert abs(value) < 1e-15
    mom = moment_set(200, 0.2)
    value, _ = centered_inverse_moment(200, 0.2, 2)
    assert value == pytest.approx(mom.sigma2 - mom.mu**2, rel=1e-12)
    _, scaled = centered_inverse_moment(2000, 0.1, 2)
    assert abs(scaled / (1 - 0.1) - 1.0) < 0.1

def test_pmf_normalized_and_positive():
    for trials, p in ((0, 0.3), (1, 0.5), (37, 0.01), (4999, 0.9)):
        w = binomial_pmf(trials, p)
        assert w.shape == (trials + 1,)
        assert (w >= 0).all()
        assert math.fsum(w) == pytest.approx(1.0, abs=1e-15)

def test_pmf_matches_direct_binomial():
    w = binomial_pmf(12, 0.35)
    direct = np.array(
        [math.comb(12, k) * 0.35**k * 0.65 ** (12 - k) for k in range(13)]
    )
    assert np.allclose(w, direct, rtol=1e-13)
