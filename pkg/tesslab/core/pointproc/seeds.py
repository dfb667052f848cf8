from enum import IntEnum

import numpy as np

from tesslab.core.errors import InvalidParameterError

type Seed = int | tuple[int, ...]


class Stream(IntEnum):
    """Substream tags; every consumer of randomness owns one."""
    sample = 0
    typical = 1
    pilot = 2
    bootstrap = 3
    sigma_single = 4
    sigma_pair = 5
    sigma_mean = 6
    insertion = 7
    guard_extension = 8
    tails = 9


def seed_path(seed: Seed, *children: int) -> tuple[int, ...]:
    """Append children to a seed path."""
    base = (seed,) if isinstance(seed, (int, np.integer)) else tuple(seed)
    return tuple(int(c) for c in (*base, *children))


def derive_rng(seed: Seed) -> np.random.Generator:
    """
    Counter-based generator for a seed path: the head is the entropy and
    the tail the spawn key, so (master, stream, replication) paths are
    independent streams.
    """
    path = seed_path(seed)
    if any(c < 0 for c in path):
        raise InvalidParameterError(f"Seed components must be >= 0, got {path}")
    sequence = np.random.SeedSequence(entropy=path[0], spawn_key=path[1:])
    return np.random.Generator(np.random.Philox(sequence))
