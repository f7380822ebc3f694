"""Named, independently seeded random substreams.

All randomness in a run flows from one 64-bit master seed.  Each component
draws from its own stream, derived by hashing ``(seed, name)``, so adding a
component or reordering draws in one stream never perturbs another.
"""

from __future__ import annotations

import hashlib
import random


def substream_seed(master_seed: int, name: str) -> int:
    digest = hashlib.sha256(f"{master_seed}:{name}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def substream(master_seed: int, name: str) -> random.Random:
    """A stdlib PRNG seeded deterministically for the named component."""
    return random.Random(substream_seed(master_seed, name))
