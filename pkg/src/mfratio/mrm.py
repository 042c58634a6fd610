"""Multifractal random measures built from a truncated-cone field.

The field is ``w_l(u) = P(A_l(u))`` where ``P`` is an independently
scattered infinitely divisible measure on the half plane with control
measure ``dt ds / t^2`` and ``A_l(u)`` is the cone
``{(s, t): t > l, |s - u| < min(t, T) / 2}``.  The measure is approximated
by the Riemann sum of ``exp(w_l)`` on a mesh whose spacing equals ``l``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, EmbeddingFailure, InvalidModel
from .grid import MEASURE, Realization, _pairwise
from .idlaws import sample_id
from .scaling import BASE2, LOGNORMAL, POISSON
from .streams import as_streams

DEFAULT_OVERSAMPLE = 3
CHOLESKY_CAP = 2 ** 13


@dataclass(frozen=True)
class ConeGeometry:
    T: float = 1.0
    l: float = 2.0 ** -10

    def __post_init__(self):
        if not 0 < self.l < self.T:
            raise DomainError("cone cutoff must satisfy 0 < l < T")

    @property
    def cone_measure(self):
        return 1 + math.log(self.T / self.l)


@dataclass
class MrmRealization(Realization):
    oversample: int = DEFAULT_OVERSAMPLE
    wl: np.ndarray = None

    @property
    def fine_spacing(self):
        return self.grid.delta * 2.0 ** (-self.oversample)

    def fine_masses(self):
        return np.exp(self.wl) * self.fine_spacing


def cone_overlap(T, l, tau):
    """Control measure of ``A_l(u) & A_l(u + tau)``.

    Equals ``1 + log(T/l) - tau/l`` for ``tau <= l``, ``log(T/tau)`` for
    ``l < tau <= T`` and 0 beyond ``T``.  Vectorised over ``tau``.
    """
    if not 0 < l < T:
        raise DomainError("cone cutoff must satisfy 0 < l < T")
    tau = np.abs(np.asarray(tau, dtype=float))
    with np.errstate(divide="ignore"):
        out = np.where(tau <= l, 1 + math.log(T / l) - tau / l,
                       np.where(tau <= T, np.log(T / np.maximum(tau, l)), 0.0))
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# stationary Gaussian vectors by circulant embedding

def embedding_eigenvalues(acov, size, max_doublings=4):
    """Eigenvalues of a nonnegative circulant embedding of a stationary covariance.

    ``acov(k)`` gives the covariance at integer lag ``k``.  The circulant
    size starts at the next power of two above ``2 (size - 1)`` and doubles
    until every eigenvalue is nonnegative up to round-off.
    """
    m = 1 << max(1, math.ceil(math.log2(max(2, 2 * (size - 1)))))
    for _ in range(max_doublings + 1):
        lags = np.arange(m // 2 + 1)
        c = acov(lags)
        row = np.concatenate([c, c[-2:0:-1]])
        eig = np.fft.rfft(row).real
        if eig.min() >= -1e-10 * eig.max():
            return np.sqrt(np.clip(eig, 0, None) / m), m
        m *= 2
    raise EmbeddingFailure(f"no nonnegative circulant embedding up to size {m // 2}")


def circulant_draw(sqrt_eig, m, size, gen, rows=None):
    """One (or ``rows``) stationary Gaussian vectors of length ``size``."""
    full = np.concatenate([sqrt_eig, sqrt_eig[-2:0:-1]])
    shape = (m,) if rows is None else (rows, m)
    z = gen.standard_normal(shape) + 1j * gen.standard_normal(shape)
    y = np.fft.fft(full * z, axis=-1).real
    return y[..., :size]


@lru_cache(maxsize=32)
def _gaussian_field_eigs(lambda2, T, l, h, size):
    def acov(k):
        return lambda2 * cone_overlap(T, l, k * h)
    return embedding_eigenvalues(acov, size)


def _is_equispaced(mesh):
    if mesh.size < 3:
        return True
    d = np.diff(mesh)
    return np.allclose(d, d[0], rtol=1e-9, atol=0)


def _gaussian_wl(lambda2, geometry, mesh, gen):
    T, l = geometry.T, geometry.l
    mean = -lambda2 / 2 * geometry.cone_measure
    if lambda2 == 0:
        return np.zeros(mesh.size)
    if _is_equispaced(mesh):
        h = float(mesh[1] - mesh[0]) if mesh.size > 1 else 1.0
        try:
            sqrt_eig, m = _gaussian_field_eigs(lambda2, T, l, h, mesh.size)
            return mean + circulant_draw(sqrt_eig, m, mesh.size, gen)
        except EmbeddingFailure:
            if mesh.size > CHOLESKY_CAP:
                raise EmbeddingFailure("circulant embedding failed and the mesh exceeds the "
                                       "dense fallback cap; lower the oversampling") from None
    elif mesh.size > CHOLESKY_CAP:
        raise EmbeddingFailure("irregular mesh larger than the dense factorisation cap")
    cov = lambda2 * cone_overlap(T, l, mesh[:, None] - mesh[None, :])
    chol = np.linalg.cholesky(cov + 1e-12 * np.eye(mesh.size))
    return mean + chol @ gen.standard_normal(mesh.size)


def _poisson_wl(model, geometry, mesh, gen):
    T, l = geometry.T, geometry.l
    lo, hi = mesh[0] - T / 2, mesh[-1] + T / 2
    # points with t > l over the widened window: total mass (hi - lo) / l
    count = gen.poisson((hi - lo) / l)
    s = gen.uniform(lo, hi, count)
    t = l / (1 - gen.uniform(0, 1, count))
    marks = _poisson_marks(model, count, gen)
    half = np.minimum(t, T) / 2
    first = np.searchsorted(mesh, s - half, side="right")
    last = np.searchsorted(mesh, s + half, side="left")
    diff = np.zeros(mesh.size + 1)
    np.add.at(diff, first, marks)
    np.add.at(diff, last, -marks)
    return np.cumsum(diff[:-1])


def _poisson_marks(model, count, gen):
    p = model.p
    if "s2" in p:
        return gen.normal(-p["s2"] / 2, math.sqrt(p["s2"]), count)
    logs = np.log(np.asarray(p["atoms"]))
    return logs[gen.choice(len(logs), size=count, p=np.asarray(p["probs"]))]


def cone_layers(T, l, h):
    """Cell layout used by the discretised field: (cells per cone, measure per cell) per layer."""
    layers = []
    t0 = l
    while t0 < T * (1 - 1e-12):
        t1 = min(2 * t0, T)
        log_ratio = math.log(t1 / t0)
        width = log_ratio / (1 / t0 - 1 / t1)
        c = max(1, int(round(width / h)))
        layers.append((c, log_ratio / c))
        t0 = t1
    c = max(1, int(round(T / h)))
    layers.append((c, 1.0 / c))
    return layers


def _cell_wl(model, geometry, mesh, gen):
    if not _is_equispaced(mesh):
        raise DomainError("the cell discretisation needs an equispaced mesh")
    n = mesh.size
    h = float(mesh[1] - mesh[0]) if n > 1 else geometry.l
    w = np.zeros(n)
    for c, mu in cone_layers(geometry.T, geometry.l, h):
        cells = sample_id(model, mu, n + c - 1, gen)
        cs = np.concatenate([[0.0], np.cumsum(cells)])
        w += cs[c:c + n] - cs[:n]
    return w


def sample_wl(model, geometry, mesh, rng):
    """Sample the cone field ``w_l`` at the points of ``mesh``.

    Gaussian models are exact in law at the mesh points (circulant embedding,
    dense Cholesky fallback).  Poisson models are exact: marks of Poisson
    points in ``{t > l}`` are summed over the cones containing each point.
    Stable models sum independent cell increments over a dyadic-in-t,
    mesh-in-s partition of each cone.
    """
    if model.log_base == BASE2:
        raise InvalidModel("random measures use the natural-log convention")
    gen = rng if isinstance(rng, np.random.Generator) else as_streams(rng).generator("field")
    mesh = np.asarray(mesh, dtype=float)
    if model.family == LOGNORMAL:
        return _gaussian_wl(model.p["lambda2"], geometry, mesh, gen)
    if model.family == POISSON:
        return _poisson_wl(model, geometry, mesh, gen)
    return _cell_wl(model, geometry, mesh, gen)


def fine_mesh(grid, oversample):
    N = grid.cells * 2 ** oversample
    h = grid.T / N
    return (np.arange(N) + 0.5) * h, h


def sample_mrm(model, grid, oversample=DEFAULT_OVERSAMPLE, rng=None):
    """Sample ``M(Delta)`` for every cell of ``grid``.

    The cutoff is tied to the fine mesh, ``l = T 2^-(n + oversample)``; each
    block draws its field from stream ``rng.child(j)``.
    """
    streams = as_streams(rng)
    mesh, h = fine_mesh(grid, oversample)
    geometry = ConeGeometry(grid.T, h)
    wl = np.empty((grid.L, mesh.size))
    for j in range(grid.L):
        wl[j] = sample_wl(model, geometry, mesh, streams.child(j).generator("field"))
    masses = _pairwise(np.exp(wl) * h, oversample)
    return MrmRealization(masses, grid, MEASURE, streams.record(),
                          {"process": "mrm", "model": model.describe()},
                          oversample=oversample, wl=wl)


def empirical_moment(real, q):
    """Mean over all cells of ``|value|^q``."""
    v = np.abs(real.values)
    if q == 0:
        return 1.0
    return float(np.mean(v ** q))
