"""Dyadic multiplicative cascades on the mixed-asymptotic layout."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidModel, NonFinite
from .grid import MEASURE, Realization
from .idlaws import sample_log_weights
from .scaling import psi_prime, zeta
from .streams import as_streams

DEFAULT_DEPTH_EXTRA = 12
_CHUNK = 2 ** 22


@dataclass
class CascadeRealization(Realization):
    depth_extra: int = DEFAULT_DEPTH_EXTRA


def check_cascade_model(model):
    if psi_prime(model, 1.0) >= 1:
        raise InvalidModel("E[W log2 W] >= 1: the cascade degenerates to zero")


def _tree_logs(model, rows, depth, gen):
    """Log of the product of weights along every path of ``rows`` trees of given depth."""
    logs = np.zeros((rows, 1))
    for level in range(1, depth + 1):
        lw = sample_log_weights(model, rows * 2 ** level, gen).reshape(rows, -1, 2)
        logs = (logs[:, :, None] + lw).reshape(rows, -1)
    return logs


def cascade_totals(model, size, depth, gen):
    """Total mass of ``size`` independent cascades truncated at ``depth``.

    With ``depth = 0`` every total is exactly 1.
    """
    out = np.empty(size)
    per = max(1, _CHUNK >> depth)
    for start in range(0, size, per):
        stop = min(size, start + per)
        logs = _tree_logs(model, stop - start, depth, gen)
        out[start:stop] = np.exp(logs).sum(axis=1) * 2.0 ** (-depth)
    return out


def sample_cascade(model, grid, depth_extra=DEFAULT_DEPTH_EXTRA, rng=None):
    """Sample cascade masses on every cell of ``grid``.

    Block ``j`` draws its weight tree from stream ``rng.child(j)``.  The
    mass of cell ``k`` at level ``n`` is ``T 2^-n prod W`` times the total of
    an independent sub-cascade truncated ``depth_extra`` levels deeper, the
    truncated stand-in for the limit measure's fluctuation factor.
    """
    check_cascade_model(model)
    streams = as_streams(rng)
    n = grid.n
    masses = np.empty((grid.L, grid.cells))
    for j in range(grid.L):
        gen = streams.child(j).generator("cascade")
        top = _tree_logs(model, 1, n, gen)[0]
        sub = cascade_totals(model, grid.cells, depth_extra, gen)
        masses[j] = grid.T * 2.0 ** (-n) * np.exp(top) * sub
    return CascadeRealization(masses, grid, MEASURE, streams.record(),
                              {"process": "cascade", "model": model.describe()},
                              depth_extra=depth_extra)


def theoretical_V(model, q, mc_samples=10 ** 4, rng=None, depth=15):
    """Monte Carlo value of the limiting variance constant V(q) and its standard error.

    ``V(q) = var(Z0^q - 2^(zeta(q)-1-q) (Z1^q W1^q + Z2^q W2^q))`` with
    ``Z1, Z2`` independent cascade totals, ``W1, W2`` independent weights and
    ``Z0 = (Z1 W1 + Z2 W2) / 2``.
    """
    check_cascade_model(model)
    gen = as_streams(rng).generator("deep")
    z1 = cascade_totals(model, mc_samples, depth, gen)
    z2 = cascade_totals(model, mc_samples, depth, gen)
    w1 = np.exp(sample_log_weights(model, mc_samples, gen))
    w2 = np.exp(sample_log_weights(model, mc_samples, gen))
    a, b = z1 * w1, z2 * w2
    z0 = (a + b) / 2
    c = 2.0 ** (float(zeta(model, q)) - 1 - q)
    with np.errstate(over="ignore", invalid="ignore"):
        stat = z0 ** q - c * (a ** q + b ** q)
    if not np.all(np.isfinite(stat)):
        raise NonFinite(f"q-th moments overflow at q={q}")
    dev = (stat - stat.mean()) ** 2
    v = dev.sum() / (mc_samples - 1)
    se = dev.std(ddof=1) / np.sqrt(mc_samples)
    return float(v), float(se)
