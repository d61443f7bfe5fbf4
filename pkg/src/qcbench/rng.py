"""Counter-based random streams.

Every stochastic routine in the package draws from a Philox generator keyed
by (master seed, stream index). Philox is counter-based, so per-shot streams
are independent of each other and of execution order: shot i always sees the
same stream no matter how many workers ran before it.
"""

import numpy as np


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Return the generator for stream `index` under `seed`."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, index & 0xFFFFFFFFFFFFFFFF],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def fold(*indices: int) -> int:
    """Fold a path of indices into one 64-bit stream id (Fibonacci mix)."""
    acc = 0
    for ix in indices:
        acc = (acc * 0x9E3779B97F4A7C15 + ix + 1) & 0xFFFFFFFFFFFFFFFF
    return acc


def substream(seed: int, *indices: int) -> np.random.Generator:
    """Stream addressed by a path of indices (e.g. (depth, sequence, shot))."""
    return stream(seed, fold(*indices))
