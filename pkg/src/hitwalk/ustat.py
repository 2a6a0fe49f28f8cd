"""Kernel, Hoeffding components, the centered pair statistics, and the
standardized average-starting-hitting-time statistic.

Naming follows the roles of the quantities: the pair kernel
h(x, y) = 1/((x+1)(y+1)) - mu^2 acts on synthetic degree surrogates
X_i ~ Bin(n-1, p); a Bernoulli(p) mask Z_ij selects which pairs enter the
incomplete sums.  The graph-side statistic replaces X by reduced degrees and
Z by actual edges.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .graphs import ConnectivityError, Graph
from .moments import MomentSet, binomial_pmf
from .rng import substream
from .spectra import normalized_adjacency, pair_sum_direct, spectrum

__all__ = [
    "kernel_h",
    "HoeffdingParts",
    "hoeffding_split",
    "SyntheticSample",
    "draw_synthetic_sample",
    "SyntheticStatistics",
    "synthetic_statistics",
    "StatisticValue",
    "statistic_un",
    "standardized_hitting",
    "ConditionDiagnostics",
    "condition_diagnostics",
    "LimitVariance",
    "limit_variance",
    "tn_second_moment_formula",
]


def kernel_h(x, y, mu: float):
    """Symmetric centered pair kernel 1/((x+1)(y+1)) - mu^2."""
    return 1.0 / ((np.asarray(x) + 1.0) * (np.asarray(y) + 1.0)) - mu * mu


class HoeffdingParts(NamedTuple):
    phi: float
    psi_ji: float
    psi_ij: float
    phi_tilde: float


def hoeffding_split(x_i, x_j, z, mu: float) -> HoeffdingParts:
    """Split the masked kernel into first-order projections and the degenerate rest.

        phi       = z * h(x_i, x_j)
        psi_ji    = z * mu * (1/(x_i+1) - mu)     (projection onto X_i)
        psi_ij    = z * mu * (1/(x_j+1) - mu)     (projection onto X_j)
        phi_tilde = z * (1/(x_i+1) - mu)(1/(x_j+1) - mu)

    phi = psi_ji + psi_ij + phi_tilde holds identically.
    """
    a = 1.0 / (np.asarray(x_i) + 1.0)
    b = 1.0 / (np.asarray(x_j) + 1.0)
    z = np.asarray(z)
    phi = z * (a * b - mu * mu)
    psi_ji = z * mu * (a - mu)
    psi_ij = z * mu * (b - mu)
    phi_tilde = z * (a - mu) * (b - mu)
    return HoeffdingParts(phi, psi_ji, psi_ij, phi_tilde)


@dataclass(frozen=True)
class SyntheticSample:
    """One draw of the synthetic model: x are n+1 iid Bin(n-1, p) values,
    z is the symmetric 0/1 pair mask (zero diagonal), independent of x."""

    x: np.ndarray
    z: np.ndarray
    seed: int


def draw_synthetic_sample(n: int, p: float, seed: int) -> SyntheticSample:
    rng = substream(seed, "synthetic")
    x = rng.binomial(n - 1, p, size=n + 1).astype(np.int64)
    iu = np.triu_indices(n + 1, 1)
    z = np.zeros((n + 1, n + 1), dtype=np.uint8)
    z[iu] = rng.random(iu[0].size) < p
    z = z | z.T
    x.flags.writeable = False
    z.flags.writeable = False
    return SyntheticSample(x=x, z=z, seed=int(seed))


@dataclass(frozen=True)
class SyntheticStatistics:
    """The four normalized statistics of one synthetic sample.

    vn_plus_zn_direct re-evaluates vn + zn through the single-sum identity
    (1/(n theta)) sum_{i<j} (Z_ij/((X_i+1)(X_j+1)) - mu^2 p); it must agree
    with vn + zn to within accumulation error.
    """

    vn: float
    zn: float
    vn_plus_zn: float
    vn_plus_zn_direct: float
    tn: float
    n: int
    p: float
    seed: int


def synthetic_statistics(
    n: int,
    p: float,
    moments: MomentSet,
    seed: int | None = None,
    sample: SyntheticSample | None = None,
) -> SyntheticStatistics:
    """Evaluate Vn, Zn, Vn+Zn and Tn on one synthetic sample.

    Vn and Zn are normalized by 1/(n theta_n), Tn by 1/(n alpha_n).
    """
    _check_moments(moments, n, p)
    if sample is None:
        if seed is None:
            raise ValueError("provide either a seed or a prepared sample")
        sample = draw_synthetic_sample(n, p, seed)
    iu = np.triu_indices(n + 1, 1)
    a = 1.0 / (sample.x + 1.0)
    z = sample.z[iu].astype(np.float64)
    prod = a[iu[0]] * a[iu[1]]
    mu2 = moments.mu * moments.mu
    n_theta = n * moments.theta
    vn = float(np.sum(z * (prod - mu2))) / n_theta
    zn = mu2 * float(np.sum(z - p)) / n_theta
    direct = float(np.sum(z * prod - mu2 * p)) / n_theta
    sum_a = float(a.sum())
    sum_a2 = float((a * a).sum())
    pair_sum = 0.5 * (sum_a * sum_a - sum_a2)
    tn = (pair_sum - iu[0].size * mu2) / (n * moments.alpha)
    return SyntheticStatistics(
        vn=vn,
        zn=zn,
        vn_plus_zn=vn + zn,
        vn_plus_zn_direct=direct,
        tn=tn,
        n=n,
        p=float(p),
        seed=sample.seed,
    )


@dataclass(frozen=True)
class StatisticValue:
    """A named scalar statistic with its audit trail of intermediate sums."""

    name: str
    value: float
    n: int
    p: float
    components: dict[str, float] = field(default_factory=dict)


def _check_moments(moments: MomentSet, n: int, p: float) -> None:
    if moments.n != n or moments.p != p:
        raise ValueError(
            f"moment set was computed at (n={moments.n}, p={moments.p}), "
            f"needed (n={n}, p={p})"
        )


def statistic_un(g: Graph, moments: MomentSet) -> StatisticValue:
    """The centered pair statistic of a graph:

        Un = (1/(n theta)) sum_{i<j} (a_ij/(d_i d_j) - mu^2 p),

    evaluated from degrees only (no spectrum)."""
    if not g.connected:
        raise ConnectivityError("statistic_un requires a connected graph")
    n = g.n_plus_1 - 1
    _check_moments(moments, n, g.p)
    pair_sum = pair_sum_direct(g)
    centering = (g.n_plus_1 * n / 2.0) * moments.mu**2 * g.p
    value = (pair_sum - centering) / (n * moments.theta)
    return StatisticValue(
        name="Un",
        value=value,
        n=n,
        p=g.p,
        components={"pair_sum": pair_sum, "centering": centering, "n_theta": n * moments.theta},
    )


def standardized_hitting(g: Graph, moments: MomentSet, mode: str = "exact") -> StatisticValue:
    """Standardized average starting hitting time

        (H^i - (n-2) - 2 mu^2 C(n+1,2) p) / (2 n theta).

    mode "exact" uses H^i = sum_{k>=2} 1/(1-lam_k) (eigenvalues only);
    "truncated" replaces H^i by (n-2) + tr(B^2).  Components always carry both
    statistics and their scaled difference (the spectral-tail remainder).
    """
    if mode not in ("exact", "truncated"):
        raise ValueError(f"mode must be 'exact' or 'truncated', got {mode!r}")
    if not g.connected:
        raise ConnectivityError("standardized_hitting requires a connected graph")
    n = g.n_plus_1 - 1
    _check_moments(moments, n, g.p)
    lam = spectrum(normalized_adjacency(g)).eigenvalues
    h_exact = float(np.sum(1.0 / (1.0 - lam[1:])))
    h_trunc = (n - 2) + float(np.sum(lam**2))
    centering = (n - 2) + 2.0 * moments.mu**2 * (g.n_plus_1 * n / 2.0) * g.p
    scale = 2.0 * n * moments.theta
    stat_exact = (h_exact - centering) / scale
    stat_trunc = (h_trunc - centering) / scale
    components = {
        "h_i_exact": h_exact,
        "h_i_truncated": h_trunc,
        "statistic_exact": stat_exact,
        "statistic_truncated": stat_trunc,
        "remainder": stat_exact - stat_trunc,
        "centering": centering,
    }
    return StatisticValue(
        name="StandardizedH",
        value=stat_exact if mode == "exact" else stat_trunc,
        n=n,
        p=g.p,
        components=components,
    )


@dataclass(frozen=True)
class ConditionDiagnostics:
    """Numeric left-hand sides of the four CLT conditions at one (n, p).

    c1 is a Monte Carlo estimate (its truncated expectation mixes n Bernoulli
    masks, so no exact sum exists); c2, c3, c4 are exact sums over the
    binomial support.
    """

    n: int
    p: float
    eps: float
    c1: float
    c2: float
    c3: float
    c4: float
    c1_stderr: float
    mc_samples: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "eps": self.eps,
            "c1": self.c1,
            "c2": self.c2,
            "c3": self.c3,
            "c4": self.c4,
            "stderr_c1": self.c1_stderr,
            "mc_samples": self.mc_samples,
        }


def condition_diagnostics(
    n: int,
    p: float,
    moments: MomentSet,
    eps: float = 0.5,
    mc_samples: int = 100_000,
    seed: int = 0,
) -> ConditionDiagnostics:
    if eps <= 0:
        raise ValueError("eps must be positive")
    _check_moments(moments, n, p)
    if mc_samples < 1000:
        warnings.warn(f"mc_samples={mc_samples} is small; c1 will be noisy", stacklevel=2)
    mu, sigma2, theta2 = moments.mu, moments.sigma2, moments.theta2
    theta = moments.theta
    w = binomial_pmf(n - 1, p)
    a = 1.0 / (np.arange(n) + 1.0)
    dev = a - mu

    # (C1) truncated second moment of the row sum of projections, by MC:
    # sum_j Psi_j(1) = mu (1/(X_1+1) - mu) * Bin(n, p) row count, the row
    # running over all n possible partners of vertex 1.
    rng = substream(seed, "cond-c1")
    x1 = rng.binomial(n - 1, p, size=mc_samples)
    row = rng.binomial(n, p, size=mc_samples)
    t = mu * (1.0 / (x1 + 1.0) - mu) * row
    vals = t * t * (np.abs(t) >= eps * theta * n)
    c1 = float(vals.mean()) / (n * theta2)
    c1_stderr = float(vals.std(ddof=1)) / math.sqrt(mc_samples) / (n * theta2)

    # (C2) exact: phi_tilde = Z (a_i - mu)(a_j - mu); only Z = 1 contributes.
    ww = np.outer(w, w)
    prod = np.outer(dev, dev)
    mask2 = np.abs(prod) >= eps * theta * n
    c2 = p * float(np.sum(ww[mask2] * prod[mask2] ** 2)) / theta2

    # (C3) exact: H_tilde(1,1) = (a_1 - mu)^2 (sigma2 - mu^2).
    h_tilde = dev * dev * (sigma2 - mu * mu)
    mask3 = np.abs(h_tilde) >= eps * theta2 * n / p
    c3 = p * float(np.sum(w[mask3] * h_tilde[mask3])) / theta2

    # (C4) exact: H(i,j) = sigma2 a_i a_j - mu^3 (a_i + a_j) + mu^4,
    # E[G_1^2(2,3)] = p^2 E[H^2].
    H = sigma2 * np.outer(a, a) - mu**3 * (a[:, None] + a[None, :]) + mu**4
    c4 = p * p * float(np.sum(ww * H * H)) / theta2**2

    return ConditionDiagnostics(
        n=n, p=float(p), eps=float(eps),
        c1=c1, c2=c2, c3=c3, c4=c4,
        c1_stderr=c1_stderr, mc_samples=mc_samples,
    )


@dataclass(frozen=True)
class LimitVariance:
    """Limit variance of the standardized statistics and the prelimit ratio
    mu^2 sqrt(C(n+1,2)) p (1-p) / (n theta), which tends to sqrt(p*(1-p*)/2)."""

    target_var: float
    prelimit_ratio: float


def limit_variance(p_star: float, n: int, p: float, moments: MomentSet) -> LimitVariance:
    if not 0.0 <= p_star <= 1.0:
        raise ValueError(f"p_star must lie in [0, 1], got {p_star}")
    _check_moments(moments, n, p)
    pairs = (n + 1) * n / 2.0
    ratio = moments.mu**2 * math.sqrt(pairs) * p * (1.0 - p) / (n * moments.theta)
    return LimitVariance(
        target_var=1.0 + p_star * (1.0 - p_star) / 2.0,
        prelimit_ratio=ratio,
    )


def tn_second_moment_formula(n: int, moments: MomentSet) -> float:
    """Closed-form E[Tn^2] = C(n,2) (2 n tilde_gamma2 + tilde_beta2) / (n^2 alpha2)."""
    pairs = n * (n - 1) / 2.0
    return pairs * (2.0 * n * moments.tilde_gamma2 + moments.tilde_beta2) / (
        n * n * moments.alpha2
    )
