"""Counter-based random streams keyed by (seed, path).

Every consumer of randomness gets its own stream derived from a master seed
and a path of non-negative integers, so the order in which streams are
created never changes what they produce.
"""
from __future__ import annotations

import numpy as np

# stream namespaces
MARKS = 0
NODES = 1
TRIALS = 2
ALGORITHM = 3
CONDITIONED = 4


def stream(seed: int, *path: int) -> np.random.Generator:
    # The path length is part of the key: SeedSequence pads short keys with
    # zeros, so (a,) and (a, 0) would otherwise collide.
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(len(path), *path)))


def derive_seed(seed: int, *path: int) -> int:
    """A 63-bit integer seed for the stream at ``path``."""
    ss = np.random.SeedSequence(seed, spawn_key=(len(path), *path))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
