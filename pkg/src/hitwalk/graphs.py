"""Erdos-Renyi graph sampling, monotone coupled sequences, and walk primitives.

Vertices are 0-based in the API; the edge-file format is 1-based.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .rng import substream

__all__ = [
    "from_adjacency",
    "ConnectivityError",
    "Graph",
    "GraphSequence",
    "sample_er",
    "sample_connected_er",
    "sample_coupled_sequence",
    "stationary_distribution",
    "reduced_degree",
    "transition_matrix",
    "to_edge_text",
    "write_edge_file",
    "read_edge_file",
]


class ConnectivityError(RuntimeError):
    """A connected graph was required but not available."""


@dataclass(frozen=True)
class Graph:
    """One realization of G(n_plus_1, p).

    adjacency is a symmetric 0/1 uint8 matrix with zero diagonal; degrees and
    edge_count are derived from it at construction.  attempts counts rejection
    rounds when the graph was conditioned on connectivity (1 otherwise).
    """

    n_plus_1: int
    adjacency: np.ndarray
    degrees: np.ndarray
    edge_count: int
    p: float
    seed: int
    connected: bool
    attempts: int = 1


@dataclass(frozen=True)
class GraphSequence:
    """Monotone edge-coupled graphs at increasing sizes.

    direction is "decreasing" (edges only ever deleted among old vertices) or
    "increasing" (the same property holds in the complement).
    """

    graphs: tuple[Graph, ...]
    p_schedule: tuple[float, ...]
    sizes: tuple[int, ...]
    direction: str
    seed: int


def _validate_p(p: float) -> None:
    # p = 0 and p = 1 make theta_n = 0 downstream; reject at the boundary.
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p}")


def _is_connected(adjacency: np.ndarray) -> bool:
    n = adjacency.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    frontier = np.zeros(n, dtype=bool)
    frontier[0] = True
    while frontier.any():
        reach = (adjacency[frontier].any(axis=0)) & ~seen
        seen |= reach
        frontier = reach
    return bool(seen.all())


def _build_graph(adjacency: np.ndarray, p: float, seed: int, attempts: int = 1) -> Graph:
    adjacency = np.ascontiguousarray(adjacency, dtype=np.uint8)
    adjacency.flags.writeable = False
    degrees = adjacency.sum(axis=1, dtype=np.int64)
    degrees.flags.writeable = False
    edge_count = int(degrees.sum()) // 2
    return Graph(
        n_plus_1=adjacency.shape[0],
        adjacency=adjacency,
        degrees=degrees,
        edge_count=edge_count,
        p=float(p),
        seed=int(seed),
        connected=_is_connected(adjacency),
        attempts=attempts,
    )


def _bernoulli_adjacency(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Symmetric 0/1 matrix from independent Bernoulli(p) upper-triangle draws."""
    iu = np.triu_indices(n, 1)
    draws = rng.random(iu[0].size) < p
    a = np.zeros((n, n), dtype=np.uint8)
    a[iu] = draws
    return a | a.T


def from_adjacency(adjacency: np.ndarray, p: float = 0.5, seed: int = 0) -> Graph:
    """Wrap an explicit 0/1 adjacency matrix (validated) as a Graph."""
    a = np.asarray(adjacency)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 2:
        raise ValueError(f"adjacency must be square with >= 2 vertices, got {a.shape}")
    if not np.array_equal(a, a.T):
        raise ValueError("adjacency must be symmetric")
    if np.any(np.diag(a) != 0):
        raise ValueError("adjacency must have zero diagonal")
    if not np.isin(a, (0, 1)).all():
        raise ValueError("adjacency entries must be 0 or 1")
    return _build_graph(a, p, seed)


def sample_er(n_plus_1: int, p: float, seed: int) -> Graph:
    """Sample G(n_plus_1, p): every unordered pair is an edge independently with probability p."""
    if n_plus_1 < 2:
        raise ValueError(f"need at least 2 vertices, got {n_plus_1}")
    _validate_p(p)
    rng = substream(seed, "er", 0)
    return _build_graph(_bernoulli_adjacency(n_plus_1, p, rng), p, seed)


def sample_connected_er(
    n_plus_1: int, p: float, seed: int, max_attempts: int = 1000
) -> Graph:
    """Rejection-sample G(n_plus_1, p) conditioned on connectivity.

    Each attempt uses a fresh substream of the master seed.  Exhausting
    max_attempts means the (n, p) pair sits outside the connectivity regime
    (np is not comfortably above log n) and raises ConnectivityError.
    """
    if n_plus_1 < 2:
        raise ValueError(f"need at least 2 vertices, got {n_plus_1}")
    _validate_p(p)
    if max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    for attempt in range(1, max_attempts + 1):
        rng = substream(seed, "er", attempt - 1)
        adjacency = _bernoulli_adjacency(n_plus_1, p, rng)
        if _is_connected(adjacency):
            return _build_graph(adjacency, p, seed, attempts=attempt)
    raise ConnectivityError(
        f"connectivity regime violated: no connected G({n_plus_1}, {p}) "
        f"in {max_attempts} attempts"
    )


def sample_coupled_sequence(
    p_schedule: Sequence[float], sizes: Sequence[int], seed: int
) -> GraphSequence:
    """Sample a monotone edge-coupled sequence with marginals G(sizes[t], p_schedule[t]).

    For a non-increasing schedule, each surviving old edge is kept
    independently with probability q(t) = p_t / p_{t-1} and pairs touching new
    vertices are fresh Bernoulli(p_t).  For a non-decreasing schedule the same
    construction is applied to the complement graph.
    """
    p_schedule = tuple(float(p) for p in p_schedule)
    sizes = tuple(int(s) for s in sizes)
    if len(p_schedule) != len(sizes) or not p_schedule:
        raise ValueError("p_schedule and sizes must be non-empty and of equal length")
    for p in p_schedule:
        _validate_p(p)
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError(f"sizes must be strictly increasing, got {sizes}")
    if sizes[0] < 2:
        raise ValueError("smallest size must be >= 2")
    non_increasing = all(b <= a for a, b in zip(p_schedule, p_schedule[1:]))
    non_decreasing = all(b >= a for a, b in zip(p_schedule, p_schedule[1:]))
    if not (non_increasing or non_decreasing):
        raise ValueError(f"p_schedule must be monotone, got {p_schedule}")
    # Constant schedules have q = 1 either way; treat them as direct coupling.
    direction = "decreasing" if non_increasing else "increasing"
    complemented = direction == "increasing"

    # Track the graph whose edge probabilities decrease: the complement when
    # the schedule increases.
    def track_p(p: float) -> float:
        return 1.0 - p if complemented else p

    rng0 = substream(seed, "coupled", 0)
    current = _bernoulli_adjacency(sizes[0], track_p(p_schedule[0]), rng0)
    graphs = [_materialize(current, complemented, p_schedule[0], seed)]
    for t in range(1, len(sizes)):
        rng = substream(seed, "coupled", t)
        q = track_p(p_schedule[t]) / track_p(p_schedule[t - 1])
        old = sizes[t - 1]
        new = sizes[t]
        grown = np.zeros((new, new), dtype=np.uint8)
        iu_old = np.triu_indices(old, 1)
        keep = rng.random(iu_old[0].size) < q
        grown[iu_old] = current[iu_old] & keep
        # pairs with at least one new vertex are fresh Bernoulli(tracked p)
        iu_new = np.triu_indices(new, 1)
        fresh_mask = iu_new[1] >= old
        fresh = rng.random(int(fresh_mask.sum())) < track_p(p_schedule[t])
        grown[iu_new[0][fresh_mask], iu_new[1][fresh_mask]] = fresh
        current = grown | grown.T
        graphs.append(_materialize(current, complemented, p_schedule[t], seed))
    return GraphSequence(
        graphs=tuple(graphs),
        p_schedule=p_schedule,
        sizes=sizes,
        direction=direction,
        seed=int(seed),
    )


def _materialize(tracked: np.ndarray, complemented: bool, p: float, seed: int) -> Graph:
    if complemented:
        adjacency = (1 - tracked).astype(np.uint8)
        np.fill_diagonal(adjacency, 0)
    else:
        adjacency = tracked.copy()
    return _build_graph(adjacency, p, seed)


def stationary_distribution(g: Graph) -> np.ndarray:
    """pi_i = d_i / (2|E|), the invariant law of the simple random walk on g."""
    if (g.degrees == 0).any():
        raise ConnectivityError("zero-degree vertex: graph is disconnected")
    return g.degrees / (2.0 * g.edge_count)


def transition_matrix(g: Graph) -> np.ndarray:
    """Row-stochastic walk matrix P_ij = a_ij / d_i."""
    if (g.degrees == 0).any():
        raise ConnectivityError("zero-degree vertex: graph is disconnected")
    return g.adjacency / g.degrees[:, None]


def reduced_degree(g: Graph, i: int, excluded: Iterable[int]) -> int:
    """Number of neighbors of i outside excluded (and outside i itself)."""
    excl = set(int(v) for v in excluded)
    if i in excl:
        raise ValueError(f"vertex {i} must not be in the excluded set")
    row = g.adjacency[i]
    return int(row.sum()) - int(sum(row[v] for v in excl))


# ---------------------------------------------------------------------------
# edge-file serialization: header "n_plus_1 p seed connected_flag", then one
# 1-based "i j" line per edge with i < j, sorted lexicographically.
# ---------------------------------------------------------------------------


def to_edge_text(g: Graph) -> str:
    lines = [f"{g.n_plus_1} {g.p!r} {g.seed} {int(g.connected)}"]
    iu = np.triu_indices(g.n_plus_1, 1)
    present = g.adjacency[iu].astype(bool)
    for i, j in zip(iu[0][present], iu[1][present]):
        lines.append(f"{i + 1} {j + 1}")
    return "\n".join(lines) + "\n"


def write_edge_file(g: Graph, path: str | Path) -> None:
    Path(path).write_text(to_edge_text(g))


def read_edge_file(path: str | Path) -> Graph:
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"empty edge file: {path}")
    head = lines[0].split()
    if len(head) != 4:
        raise ValueError(f"bad edge-file header: {lines[0]!r}")
    n_plus_1 = int(head[0])
    p = float(head[1])
    seed = int(head[2])
    adjacency = np.zeros((n_plus_1, n_plus_1), dtype=np.uint8)
    for ln in lines[1:]:
        si, sj = ln.split()
        i, j = int(si) - 1, int(sj) - 1
        if not (0 <= i < j < n_plus_1):
            raise ValueError(f"bad edge line {ln!r} for n_plus_1={n_plus_1}")
        adjacency[i, j] = adjacency[j, i] = 1
    return _build_graph(adjacency, p, seed)
