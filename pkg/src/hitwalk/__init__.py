"""Hitting-time statistics of random walks on Erdos-Renyi graphs.

Sampling (graphs), spectra and hitting times (spectra), binomial inverse
moments (moments), pair statistics and their Hoeffding pieces (ustat),
Monte Carlo campaigns (harness), appendix enumeration (combinatorics),
and the acceptance suite (acceptance).
"""

__version__ = "0.1.0"

from .graphs import (
    ConnectivityError,
    Graph,
    GraphSequence,
    read_edge_file,
    reduced_degree,
    sample_connected_er,
    sample_coupled_sequence,
    sample_er,
    stationary_distribution,
    write_edge_file,
)
from .moments import MomentSet, moment_set
from .spectra import (
    avg_starting_hitting,
    avg_target_hitting,
    hitting_matrix_exact,
    hitting_matrix_spectral,
    normalized_adjacency,
    spectrum,
    trace_moments,
)
from .ustat import (
    condition_diagnostics,
    hoeffding_split,
    kernel_h,
    limit_variance,
    standardized_hitting,
    statistic_un,
    synthetic_statistics,
)
from .harness import TrialPlan, empirical_summary, ks_distance, run_trials

__all__ = [
    "__version__",
    "ConnectivityError",
    "Graph",
    "GraphSequence",
    "MomentSet",
    "TrialPlan",
    "avg_starting_hitting",
    "avg_target_hitting",
    "condition_diagnostics",
    "empirical_summary",
    "hitting_matrix_exact",
    "hitting_matrix_spectral",
    "hoeffding_split",
    "kernel_h",
    "ks_distance",
    "limit_variance",
    "moment_set",
    "normalized_adjacency",
    "read_edge_file",
    "reduced_degree",
    "run_trials",
    "sample_connected_er",
    "sample_coupled_sequence",
    "sample_er",
    "spectrum",
    "standardized_hitting",
    "stationary_distribution",
    "statistic_un",
    "synthetic_statistics",
    "trace_moments",
    "write_edge_file",
]
