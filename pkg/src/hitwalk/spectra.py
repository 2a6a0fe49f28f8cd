"""Normalized adjacency spectra, hitting times by two independent routes,
average hitting times, and the trace identities behind the expansion of H^i.

The two hitting-time routes cross-validate each other: first-step linear
solves (one dense solve per target column) and the spectral representation

    H_ij = 2|E| * sum_{k>=2} (1/(1-lam_k)) (v_kj^2/d_j - v_ki v_kj / sqrt(d_i d_j)).

The top eigenpair is excluded by sorted position, never by value threshold.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graphs import ConnectivityError, Graph, stationary_distribution, transition_matrix

__all__ = [
    "SpectralData",
    "HittingMatrix",
    "TraceMoments",
    "normalized_adjacency",
    "spectrum",
    "hitting_matrix_exact",
    "hitting_matrix_spectral",
    "avg_starting_hitting",
    "avg_starting_scalar",
    "avg_target_hitting",
    "trace_moments",
    "dump_matrix_csv",
]

_SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class SpectralData:
    """Full spectrum of a normalized adjacency, eigenvalues sorted descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    residual: float


@dataclass(frozen=True)
class HittingMatrix:
    """Expected first-passage times H_ij, zero diagonal; method is the route used."""

    matrix: np.ndarray
    method: str


def normalized_adjacency(g: Graph) -> np.ndarray:
    """B = D^{-1/2} A D^{-1/2}; requires every degree positive."""
    if (g.degrees == 0).any():
        raise ConnectivityError("zero-degree vertex: graph is disconnected")
    inv_sqrt_d = 1.0 / np.sqrt(g.degrees.astype(np.float64))
    return g.adjacency * np.outer(inv_sqrt_d, inv_sqrt_d)


def spectrum(B: np.ndarray, want_vectors: bool = False) -> SpectralData:
    """Real spectrum of a symmetric matrix, sorted descending, vectors orthonormal."""
    B = np.asarray(B, dtype=np.float64)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {B.shape}")
    asym = float(np.max(np.abs(B - B.T))) if B.size else 0.0
    if asym > _SYMMETRY_TOL:
        raise ValueError(f"matrix is not symmetric (max |B - B^T| = {asym:.3g})")
    if want_vectors:
        vals, vecs = np.linalg.eigh(B)
        order = np.argsort(vals)[::-1]
        vals = vals[order]
        vecs = vecs[:, order]
        residual = float(np.max(np.abs(B @ vecs - vecs * vals)))
        return SpectralData(eigenvalues=vals, eigenvectors=vecs, residual=residual)
    vals = np.linalg.eigvalsh(B)[::-1]
    return SpectralData(eigenvalues=vals, eigenvectors=None, residual=0.0)


def hitting_matrix_exact(g: Graph) -> HittingMatrix:
    """First-step analysis: for each target j solve (I - P_{-j}) h = 1.

    This route never touches the spectrum and serves as the independent
    oracle for hitting_matrix_spectral.
    """
    P = transition_matrix(g)
    n1 = g.n_plus_1
    H = np.zeros((n1, n1))
    idx = np.arange(n1)
    for j in range(n1):
        keep = idx != j
        M = np.eye(n1 - 1) - P[np.ix_(keep, keep)]
        try:
            h = np.linalg.solve(M, np.ones(n1 - 1))
        except np.linalg.LinAlgError as exc:
            raise ConnectivityError(f"singular first-step system for target {j}") from exc
        H[keep, j] = h
    return HittingMatrix(matrix=H, method="exact-linear")


def hitting_matrix_spectral(g: Graph, spectral: SpectralData | None = None) -> HittingMatrix:
    """Evaluate the spectral hitting-time formula from the full eigensystem."""
    if spectral is None:
        spectral = spectrum(normalized_adjacency(g), want_vectors=True)
    if spectral.eigenvectors is None:
        raise ValueError("hitting_matrix_spectral needs eigenvectors")
    lam = spectral.eigenvalues[1:]
    V = spectral.eigenvectors[:, 1:]
    weights = 1.0 / (1.0 - lam)
    S = (V * weights) @ V.T
    d = g.degrees.astype(np.float64)
    sqrt_d = np.sqrt(d)
    H = 2.0 * g.edge_count * (np.diag(S)[None, :] / d[None, :] - S / np.outer(sqrt_d, sqrt_d))
    np.fill_diagonal(H, 0.0)
    return HittingMatrix(matrix=H, method="spectral")


def avg_starting_scalar(g: Graph, spectral: SpectralData | None = None) -> float:
    """H^i as the eigenvalue sum over the non-top spectrum: sum_{k>=2} 1/(1-lam_k)."""
    if spectral is None:
        spectral = spectrum(normalized_adjacency(g))
    return float(np.sum(1.0 / (1.0 - spectral.eigenvalues[1:])))


def avg_starting_hitting(
    g: Graph,
    method: str = "spectral-scalar",
    hitting: HittingMatrix | None = None,
) -> tuple[np.ndarray, float]:
    """Average starting hitting time H^i = sum_j pi_j H_ij.

    "exact-definition" computes per-vertex values from a hitting matrix and pi
    (scalar = their mean); "spectral-scalar" computes the single eigenvalue sum
    (no vectors needed) and broadcasts it.  H^i is vertex-independent, so the
    two routes agree.
    """
    if method == "spectral-scalar":
        scalar = avg_starting_scalar(g)
        return np.full(g.n_plus_1, scalar), scalar
    if method == "exact-definition":
        if hitting is None:
            hitting = hitting_matrix_exact(g)
        pi = stationary_distribution(g)
        per_vertex = hitting.matrix @ pi
        return per_vertex, float(per_vertex.mean())
    raise ValueError(f"unknown method {method!r}")


def avg_target_hitting(g: Graph, hitting: HittingMatrix | None = None) -> np.ndarray:
    """Average target hitting time H_j = sum_i pi_i H_ij (used for the LLN check)."""
    if hitting is None:
        hitting = hitting_matrix_exact(g)
    pi = stationary_distribution(g)
    return hitting.matrix.T @ pi


@dataclass(frozen=True)
class TraceMoments:
    """Eigenvalue power sums and their eigenvalue-free counterparts.

    t2/t3 come from the spectrum; t2_direct = 2 sum_{i<j} a_ij/(d_i d_j) and
    t3_direct = sum over pairwise-distinct triples a_ij a_jk a_ki/(d_i d_j d_k)
    are accumulated with compensated summation.  h_i_expansion = (n-2) + t2 is
    the truncated statistic numerator.
    """

    t2: float
    t3: float
    t2_direct: float
    t3_direct: float
    h_i_expansion: float
    t2_error: float
    t3_error: float


def pair_sum_direct(g: Graph) -> float:
    """sum_{i<j} a_ij / (d_i d_j), compensated; eigenvalue-free tr(B^2)/2."""
    if (g.degrees == 0).any():
        raise ConnectivityError("zero-degree vertex: graph is disconnected")
    iu = np.triu_indices(g.n_plus_1, 1)
    d = g.degrees.astype(np.float64)
    terms = g.adjacency[iu] / (d[iu[0]] * d[iu[1]])
    return math.fsum(terms)


def trace_moments(g: Graph, spectral: SpectralData | None = None) -> TraceMoments:
    if spectral is None:
        spectral = spectrum(normalized_adjacency(g))
    lam = spectral.eigenvalues
    t2 = float(np.sum(lam**2))
    t3 = float(np.sum(lam**3))
    t2_direct = 2.0 * pair_sum_direct(g)
    B = normalized_adjacency(g)
    # per-vertex closed-3-walk weights; zero diagonal of B kills repeated indices
    diag3 = np.einsum("ij,jk,ki->i", B, B, B)
    t3_direct = math.fsum(diag3)
    n = g.n_plus_1 - 1
    return TraceMoments(
        t2=t2,
        t3=t3,
        t2_direct=t2_direct,
        t3_direct=t3_direct,
        h_i_expansion=(n - 2) + t2,
        t2_error=abs(t2 - t2_direct),
        t3_error=abs(t3 - t3_direct),
    )


def dump_matrix_csv(path: str | Path, matrix: np.ndarray) -> None:
    """Row-major CSV with 17 significant digits."""
    matrix = np.atleast_2d(np.asarray(matrix))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in matrix:
            writer.writerow([f"{x:.17g}" for x in row])
