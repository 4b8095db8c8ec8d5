"""
Counter-based random streams
One Philox stream per (seed, stream, path index): ensembles do not depend on
the order in which workers pick up paths.
"""

import numpy as np

__all__ = ["STREAM_PATHS", "STREAM_OMEGA", "STREAM_BRIDGE", "STREAM_MODEL", "path_rng"]

# stream tags keep unrelated consumers of one seed apart
STREAM_PATHS = 0
STREAM_OMEGA = 1
STREAM_BRIDGE = 2
STREAM_MODEL = 3

_SEED_MASK = (1 << 64) - 1


def path_rng(seed: int, path_index: int = 0, stream: int = STREAM_PATHS) -> np.random.Generator:
    """
    Generator for one path.

    The key is derived from (seed, stream, path_index) through SeedSequence, so
    any path can be regenerated in isolation.
    """
    if seed < 0 or path_index < 0:
        raise ValueError("seed and path_index must be non-negative")
    entropy = [seed & _SEED_MASK, stream, path_index]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
