"""One root seed, many independent streams.

Every randomized step draws from ``rng(root, "purpose", ...)``. Labels are
hashed with CRC-32 into the spawn key of a numpy SeedSequence, so a stream
depends only on the root seed and its labels, never on call order.
"""

import zlib

import numpy as np


def _key(labels):
    return tuple(zlib.crc32(str(label).encode("utf-8")) for label in labels)


def seed_sequence(root: int, *labels) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=int(root), spawn_key=_key(labels))


def rng(root: int, *labels) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(root, *labels))


def derive_seed(root: int, *labels) -> int:
    """A 32-bit integer seed for libraries that want a plain int."""
    return int(seed_sequence(root, *labels).generate_state(1)[0])
