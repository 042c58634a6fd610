"""Mixed-asymptotic observation layout and sampled realizations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ShapeError

MEASURE = "measure"
INCREMENTS = "increments"


def blocks_for(n, chi):
    """Number of independent unit intervals, ``floor(2 ** (n * chi))``."""
    # the epsilon guards exact powers of two against round-off
    return max(1, int(math.floor(2.0 ** (n * chi) + 1e-9)))


@dataclass(frozen=True)
class MixedGrid:
    """``L`` disjoint intervals of length ``T``, each cut into ``2**n`` cells.

    ``L`` defaults to ``floor(2**(n*chi))``; pass it explicitly when the
    sampling depth differs from the level that sets the block count (see
    :meth:`for_estimation`).
    """

    n: int
    chi: float = 0.0
    T: float = 1.0
    L: int = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ShapeError("n must be a nonnegative integer")
        if self.chi < 0:
            raise ShapeError("chi must be >= 0")
        if not self.T > 0:
            raise ShapeError("T must be > 0")
        if self.L is None:
            object.__setattr__(self, "L", blocks_for(self.n, self.chi))
        if self.L < 1:
            raise ShapeError("L must be >= 1")

    @classmethod
    def for_estimation(cls, n, chi, T=1.0):
        """Grid sampled one level below ``n`` so that the ratio at level ``n`` is available."""
        return cls(n + 1, chi, T, blocks_for(n, chi))

    @property
    def cells(self):
        return 2 ** self.n

    @property
    def delta(self):
        return self.T * 2.0 ** (-self.n)

    def interval(self, j):
        return (j * self.T, (j + 1) * self.T)

    def coarsen(self, levels_up):
        return replace(self, n=self.n - levels_up)


@dataclass
class Realization:
    """Finest-scale increments, one row of ``2**n`` values per block.

    ``kind`` is ``"measure"`` for nonnegative masses and ``"increments"``
    for signed walk increments.
    """

    values: np.ndarray
    grid: MixedGrid
    kind: str = MEASURE
    seed: dict = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.L, self.grid.cells):
            raise ShapeError(f"values shape {self.values.shape} does not match "
                             f"grid ({self.grid.L}, {self.grid.cells})")

    @property
    def masses(self):
        return self.values

    @property
    def increments(self):
        return self.values

    @property
    def n(self):
        return self.grid.n

    @property
    def L(self):
        return self.grid.L


def _pairwise(values, times):
    for _ in range(times):
        values = values[:, 0::2] + values[:, 1::2]
    return values


def aggregate(real, levels_up):
    """Coarsen ``real`` by ``levels_up`` dyadic levels, summing adjacent pairs.

    Pairs are summed one level at a time, so ``aggregate(aggregate(x, 1), 1)``
    is bit-identical to ``aggregate(x, 2)``.
    """
    if levels_up == 0:
        return real
    if not 1 <= levels_up <= real.grid.n:
        raise ShapeError(f"levels_up must lie in [1, {real.grid.n}]")
    return Realization(_pairwise(real.values, levels_up), real.grid.coarsen(levels_up),
                       real.kind, real.seed, dict(real.meta))


def level_values(real, m):
    """Increments of ``real`` at dyadic level ``m`` (``m <= n``)."""
    return aggregate(real, real.grid.n - m).values
