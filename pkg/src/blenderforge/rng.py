"""Counter-based randomness: every stream derives from (seed, shard indices),
so parallel shards are deterministic and order-independent."""

from __future__ import annotations

import numpy as np

_MASK = (1 << 63) - 1


def philox_rng(*entropy: int) -> np.random.Generator:
    """Philox generator keyed by the given integers."""
    ss = np.random.SeedSequence(entropy=[int(e) & _MASK for e in entropy])
    return np.random.Generator(np.random.Philox(ss))
