"""Counter-keyed random streams.

Every consumer derives its generator from ``(master_seed, *key)`` instead of
sharing one sequential generator, so results do not depend on the order in
which work items are evaluated.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def stream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed) & _MASK64, spawn_key=tuple(int(k) & _MASK64 for k in key))
    return np.random.Generator(np.random.PCG64(ss))
