"""Multifractal random walks driven by a random measure.

``H = 1/2``: conditionally on the measure the increments are independent
centred Gaussians with variance ``M(Delta)``.

``H > 1/2``: the walk is the product Riemann sum of ``exp(w_l)`` against
fractional Gaussian noise on the fine mesh, aggregated to the observation
level.  This is not a time-changed fractional Brownian motion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import EmbeddingFailure, InvalidH, ValidityError
from .grid import INCREMENTS, Realization, _pairwise
from .mrm import (DEFAULT_OVERSAMPLE, MrmRealization, circulant_draw, embedding_eigenvalues,
                  sample_mrm)
from .scaling import psi
from .streams import as_streams


@dataclass
class MrwPath(Realization):
    H: float = 0.5
    mrm: MrmRealization = None


def fgn_autocovariance(H, k):
    """``gamma(k) = (|k+1|^2H - 2|k|^2H + |k-1|^2H) / 2``."""
    k = np.abs(np.asarray(k, dtype=float))
    h2 = 2 * H
    return 0.5 * (np.abs(k + 1) ** h2 - 2 * k ** h2 + np.abs(k - 1) ** h2)


@lru_cache(maxsize=32)
def _fgn_eigs(H, count):
    return embedding_eigenvalues(lambda k: fgn_autocovariance(H, k), count)


def sample_fgn(H, count, rng, rows=None):
    """Fractional Gaussian noise with unit spacing (Davies-Harte).

    Returns ``count`` values, or an array ``(rows, count)`` of independent
    paths when ``rows`` is given.
    """
    if not 0 < H < 1:
        raise InvalidH("H must lie in (0, 1)")
    if count < 1:
        raise ValueError("count must be >= 1")
    gen = rng if isinstance(rng, np.random.Generator) else as_streams(rng).generator("fgn")
    shape = (count,) if rows is None else (rows, count)
    if H == 0.5 or count == 1:
        return gen.standard_normal(shape)
    try:
        sqrt_eig, m = _fgn_eigs(float(H), int(count))
    except EmbeddingFailure as exc:  # not expected for 0 < H < 1
        raise RuntimeError(f"fGn embedding failed for H={H}") from exc
    return circulant_draw(sqrt_eig, m, count, gen, rows)


def check_walk(model, H):
    if not 0.5 <= H < 1:
        raise InvalidH(f"H = {H} outside [1/2, 1)")
    if H > 0.5 and not H - float(psi(model, 2.0)) / 2 > 0.5:
        raise ValidityError(f"H - psi(2)/2 = {H - float(psi(model, 2.0)) / 2:.6g} <= 1/2")


def sample_mrw(model, H, grid, oversample=DEFAULT_OVERSAMPLE, rng=None, mrm=None):
    """Sample walk increments on every cell of ``grid``.

    Passing an existing ``mrm`` (sampled on the same grid and oversampling)
    redraws only the Gaussian part, i.e. samples conditionally on the measure.
    """
    check_walk(model, H)
    streams = as_streams(rng)
    if mrm is None:
        mrm = sample_mrm(model, grid, oversample, streams)
    elif mrm.grid != grid or mrm.oversample != oversample:
        raise ValueError("mrm was sampled on a different layout")
    dx = np.empty((grid.L, grid.cells))
    if H == 0.5:
        for j in range(grid.L):
            gen = streams.child(j).generator("noise")
            dx[j] = np.sqrt(mrm.values[j]) * gen.standard_normal(grid.cells)
    else:
        h = mrm.fine_spacing
        N = mrm.wl.shape[1]
        for j in range(grid.L):
            gen = streams.child(j).generator("fgn")
            fine = np.exp(mrm.wl[j]) * h ** H * sample_fgn(H, N, gen)
            dx[j] = _pairwise(fine[None, :], oversample)[0]
    return MrwPath(dx, grid, INCREMENTS, streams.record(),
                   {"process": "mrw", "model": model.describe(), "H": H},
                   H=H, mrm=mrm)


def conditional_variances(mrm, H, level=None):
    """Conditional variances ``a^2`` of every walk increment at ``level``.

    The conditional covariance kernel ``H(2H-1)|u-v|^(2H-2)`` is integrated
    exactly over pairs of fine cells carrying uniform density, which gives
    ``h^(2H-2) sum_ij m_i m_j gamma(i-j)`` with ``gamma`` the fGn
    autocovariance; the diagonal cell is handled by the same exact integral.
    """
    if not 0.5 < H < 1:
        raise InvalidH("conditional variances are defined here for 1/2 < H < 1")
    level = mrm.grid.n if level is None else level
    up = mrm.grid.n - level + mrm.oversample
    fine = mrm.fine_masses()
    h = mrm.fine_spacing
    c = 2 ** up
    blocks = fine.reshape(mrm.grid.L, -1, c)
    g = fgn_autocovariance(H, np.arange(c)[:, None] - np.arange(c)[None, :])
    quad = np.einsum("jki,il,jkl->jk", blocks, g, blocks)
    return h ** (2 * H - 2) * quad


def conditional_sigma(mrm, H, j, k, level=None):
    """Conditional standard deviation ``a_{j,k}`` of one walk increment."""
    level = mrm.grid.n if level is None else level
    up = mrm.grid.n - level + mrm.oversample
    c = 2 ** up
    m = mrm.fine_masses()[j, k * c:(k + 1) * c]
    g = fgn_autocovariance(H, np.arange(c)[:, None] - np.arange(c)[None, :])
    return math.sqrt(mrm.fine_spacing ** (2 * H - 2) * float(m @ g @ m))


def gaussian_abs_moment(q):
    """``c_q = E|N(0,1)|^q``."""
    return 2 ** (q / 2) * math.gamma((q + 1) / 2) / math.sqrt(math.pi)
