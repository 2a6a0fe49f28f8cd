"""Deterministic RNG substreams derived from a master seed and a purpose path.

Every stochastic routine in the package draws from a stream keyed by
(master seed, purpose tag, indices...).  Results are therefore independent
of iteration order, worker count, and scheduling, and any single unit of
work can be reproduced in isolation from its recorded key.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _encode(part: int | str) -> int:
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError(f"substream path entries must be non-negative, got {part}")
        return int(part)
    # stable across processes and platforms (unlike hash())
    return int.from_bytes(hashlib.sha256(str(part).encode()).digest()[:8], "big")


def seed_sequence(master_seed: int, *path: int | str) -> np.random.SeedSequence:
    return np.random.SeedSequence([_encode(master_seed)] + [_encode(p) for p in path])


def substream(master_seed: int, *path: int | str) -> np.random.Generator:
    """A generator for the substream (master_seed, *path)."""
    return np.random.default_rng(seed_sequence(master_seed, *path))


def derived_seed(master_seed: int, *path: int | str) -> int:
    """A single reproducible integer seed for the substream, suitable for logging."""
    return int(seed_sequence(master_seed, *path).generate_state(1, np.uint64)[0])
