"""Brute-force weighted sums over stone placements in a vertex-pair field.

Place 2k stones into the cells of an (n+1) x (n+1) field (unordered variant:
cells above the diagonal, counts mirrored; ordered variant: all off-diagonal
cells).  Discard any placement in which some row ends up with exactly one
stone (unordered rows count both mirror halves).  Each surviving placement is
weighted by p to the number of non-empty cells.  Placements are labeled: a
count matrix contributes once per assignment of the 2k distinguishable stones
to cells, i.e. with multinomial multiplicity.

Enumeration is recursive over cells in row-major order with pruning as soon
as a finished row is stuck at a single stone.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

__all__ = ["ConfigSum", "weighted_config_sum", "RatioScan", "bound_ratio_scan"]

_MAX_VERTICES = 10
_MAX_K = 2


@dataclass(frozen=True)
class ConfigSum:
    """Weighted sum over admissible stone placements and their labeled count."""

    n_plus_1: int
    k: int
    p: float
    ordered: bool
    value: float
    config_count: int


def _cells(n_plus_1: int, ordered: bool) -> list[tuple[int, int]]:
    if ordered:
        return [(i, j) for i in range(n_plus_1) for j in range(n_plus_1) if i != j]
    return [(i, j) for i in range(n_plus_1) for j in range(i + 1, n_plus_1)]


def weighted_config_sum(n_plus_1: int, k: int, p: float, ordered: bool = False) -> ConfigSum:
    if not 2 <= n_plus_1 <= _MAX_VERTICES:
        raise ValueError(f"n_plus_1 must be in 2..{_MAX_VERTICES} (enumeration regime)")
    if not 1 <= k <= _MAX_K:
        raise ValueError(f"k must be in 1..{_MAX_K} (enumeration regime)")
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")

    cells = _cells(n_plus_1, ordered)
    stones = 2 * k
    # row load of vertex v: ordered -> sum of row v; unordered -> stones
    # incident to v (row plus mirrored column).
    loads = [0] * n_plus_1
    # index of the last cell contributing to each row, for final-row pruning
    last_touch = [0] * n_plus_1
    for idx, (i, j) in enumerate(cells):
        last_touch[i] = idx
        if not ordered:
            last_touch[j] = idx

    powers = [p**e for e in range(stones + 1)]
    total = 0.0
    count = 0

    def place(idx: int, remaining: int, nonzero: int, mult: int) -> None:
        nonlocal total, count
        if remaining == 0 or idx == len(cells):
            if remaining == 0 and all(load != 1 for load in loads):
                total += mult * powers[nonzero]
                count += mult
            return
        i, j = cells[idx]
        for c in range(remaining + 1):
            loads[i] += c
            if not ordered:
                loads[j] += c
            ok = True
            if last_touch[i] == idx and loads[i] == 1:
                ok = False
            if ok and not ordered and last_touch[j] == idx and loads[j] == 1:
                ok = False
            if ok:
                place(
                    idx + 1,
                    remaining - c,
                    nonzero + (1 if c else 0),
                    mult * comb(remaining, c),
                )
            loads[i] -= c
            if not ordered:
                loads[j] -= c
    place(0, stones, 0, 1)
    return ConfigSum(
        n_plus_1=n_plus_1, k=k, p=float(p), ordered=ordered,
        value=total, config_count=count,
    )


@dataclass(frozen=True)
class RatioScan:
    """Per-size ratios of the weighted sum to its claimed growth envelope:
    n^k (np)^k for the unordered variant, (np)^(2k) for the ordered one
    (n = n_plus_1 - 1)."""

    n_plus_1_list: tuple[int, ...]
    ratios: tuple[float, ...]
    max_ratio: float
    k: int
    p: float
    ordered: bool


def bound_ratio_scan(k: int, n_list, p: float, ordered: bool = False) -> RatioScan:
    sizes = tuple(int(v) for v in n_list)
    ratios = []
    for n_plus_1 in sizes:
        cs = weighted_config_sum(n_plus_1, k, p, ordered=ordered)
        n = n_plus_1 - 1
        envelope = (n * p) ** (2 * k) if ordered else n**k * (n * p) ** k
        ratios.append(cs.value / envelope)
    return RatioScan(
        n_plus_1_list=sizes,
        ratios=tuple(ratios),
        max_ratio=max(ratios),
        k=k,
        p=float(p),
        ordered=ordered,
    )
