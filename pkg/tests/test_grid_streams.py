import numpy as np
import pytest

from mfratio import MixedGrid, Realization, Streams, aggregate, level_values
from mfratio.errors import ShapeError
from mfratio.grid import blocks_for
from mfratio.streams import as_streams


def test_block_counts():
    assert blocks_for(10, 0.5) == 32
    assert blocks_for(9, 0.5) == 22
    assert blocks_for(10, 0.0) == 1
    g = MixedGrid.for_estimation(10, 0.5)
    assert (g.n, g.L, g.cells) == (11, 32, 2048)


def test_grid_geometry():
    g = MixedGrid(4, 0.0, 2.0)
    assert g.delta == 2.0 / 16
    assert g.interval(3) == (6.0, 8.0)
    assert g.coarsen(2).cells == 4


def test_shape_check():
    with pytest.raises(ShapeError):
        Realization(np.zeros((2, 8)), MixedGrid(3, 0, 1, 3))


def test_aggregate_is_pairwise_and_associative():
    rng = np.random.default_rng(0)
    r = Realization(rng.random((3, 64)), MixedGrid(6, 0, 1, 3))
    once = aggregate(r, 3).values
    twice = aggregate(aggregate(aggregate(r, 1), 1), 1).values
    assert np.array_equal(once, twice)
    brute = r.values.reshape(3, 8, 8).sum(axis=2)
    assert np.allclose(once, brute, rtol=1e-14)
    assert np.array_equal(level_values(r, 6), r.values)


def test_streams_are_keyed():
    a = Streams(5).child(1, 2).generator("field").random(4)
    b = Streams(5).child(1).child(2).generator("field").random(4)
    c = Streams(5).child(1, 3).generator("field").random(4)
    d = Streams(5).child(1, 2).generator("fgn").random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)
    assert as_streams(7).seed == 7
    s = Streams(9)
    assert as_streams(s) is s
    assert Streams(3, (1, 2)).record() == {"seed": 3, "key": [1, 2]}
