"""Counter-based random streams for reproducible, parallelizable Monte Carlo.

A master seed plus a stream index fully determines every draw.  Chunked
estimators derive one generator per chunk from (seed, chunk_index), so the
tallies are independent of how chunks are scheduled across threads.
"""

import numpy as np

DEFAULT_CHUNK = 16384


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Generator for stream `index` of master seed `seed` (Philox, counter-based)."""
    return np.random.Generator(np.random.Philox(key=np.random.SeedSequence((int(seed), int(index))).generate_state(2, np.uint64)))


def chunk_sizes(trials: int, chunk: int = DEFAULT_CHUNK):
    """Fixed partition of `trials` into chunks; independent of thread count."""
    n_full, rem = divmod(int(trials), chunk)
    sizes = [chunk] * n_full
    if rem:
        sizes.append(rem)
    return sizes
