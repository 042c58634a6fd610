"""Deterministic, keyed random streams.

A stream is identified by a master seed and a key path such as
``(replication, block, purpose)``.  The key is hashed together with the
seed by :class:`numpy.random.SeedSequence` and drives a counter-based
Philox generator, so the numbers a block receives never depend on how
many other blocks exist or in which order, or on which thread, they are drawn.
"""
from __future__ import annotations

import numpy as np

# Purpose tags are part of the public seeding contract; never renumber.
PURPOSES = {
    "cascade": 0,
    "field": 1,
    "fgn": 2,
    "noise": 3,
    "bootstrap": 4,
    "deep": 5,
    "weights": 6,
    "misc": 7,
}

MASK64 = (1 << 64) - 1


class Streams:
    """Node of a tree of independent random streams.

    >>> s = Streams(7)
    >>> g = s.child(3).generator("cascade")   # replication 3, block stream
    """

    def __init__(self, seed=0, key=()):
        self.seed = int(seed) & MASK64
        self.key = tuple(int(k) for k in key)

    def child(self, *key):
        return Streams(self.seed, self.key + tuple(int(k) for k in key))

    def generator(self, purpose="misc"):
        tag = PURPOSES[purpose] if isinstance(purpose, str) else int(purpose)
        ss = np.random.SeedSequence(self.seed, spawn_key=self.key + (tag,))
        return np.random.Generator(np.random.Philox(ss))

    def record(self):
        """JSON-friendly description of this node."""
        return {"seed": self.seed, "key": list(self.key)}

    def __repr__(self):
        return f"Streams(seed={self.seed}, key={self.key})"


def as_streams(rng):
    """Coerce an int seed, ``None`` or an existing :class:`Streams`."""
    if isinstance(rng, Streams):
        return rng
    if rng is None:
        return Streams(np.random.SeedSequence().entropy)
    return Streams(rng)
