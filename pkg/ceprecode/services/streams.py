"""
Deterministic random streams.

Every random draw in an experiment comes from a stream keyed by
(master seed, slot index, purpose), so results do not depend on which
worker thread handles a slot or on which solvers run alongside.
"""

import zlib
from typing import Union

import numpy as np

Key = Union[int, str]


def _key_to_int(key: Key) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    return int(key)


def derive_seed(*keys: Key) -> int:
    """A 63-bit seed determined by the keys alone."""
    sequence = np.random.SeedSequence([_key_to_int(k) for k in keys])
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def stream(*keys: Key) -> np.random.Generator:
    """A numpy Generator keyed by the given values."""
    return np.random.default_rng(np.random.SeedSequence([_key_to_int(k) for k in keys]))
