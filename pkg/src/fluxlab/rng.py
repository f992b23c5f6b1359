"""Deterministic random streams.

Philox is a counter-based generator: a (seed, stream) pair fully determines
the draw sequence, independent of what any other stream has consumed. Every
report records the seed so runs can be replayed bit for bit.
"""

from __future__ import annotations

import numpy as np

GENERATOR_NAME = "philox"


def generator(seed: int, *stream: int) -> np.random.Generator:
    """Return the Philox generator for a given seed and stream indices."""
    ss = np.random.SeedSequence(
        entropy=int(seed), spawn_key=tuple(int(s) for s in stream)
    )
    return np.random.Generator(np.random.Philox(seed=ss))
