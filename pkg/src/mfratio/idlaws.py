"""Samplers for the infinitely divisible laws that drive every model.

``sample_id(model, mu, size, rng)`` draws ``P(A)`` for sets of control
measure ``mu(A) = mu``; the draws satisfy ``E[exp(q P(A))] = exp(psi(q) mu)``
with ``psi`` read in the natural-log convention.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import InvalidModel
from .scaling import BASE2, LOGNORMAL, POISSON, STABLE_SUB


def stable_skewed_left(alpha, size, rng):
    """Standard totally left-skewed stable variates (beta = -1, scale 1).

    Chambers-Mallows-Stuck construction in the S1 parameterisation, for which
    ``E[exp(q X)] = exp(-q**alpha / cos(pi alpha / 2))`` for ``q >= 0``.
    """
    if alpha == 1 or not 0 < alpha < 2:
        raise InvalidModel("alpha must lie in (0, 1) or (1, 2)")
    beta = -1.0
    v = rng.uniform(-math.pi / 2, math.pi / 2, size)
    w = rng.standard_exponential(size)
    t = beta * math.tan(math.pi * alpha / 2)
    b = math.atan(t) / alpha
    s = (1 + t * t) ** (1 / (2 * alpha))
    ab = alpha * (v + b)
    return (s * np.sin(ab) / np.cos(v) ** (1 / alpha)
            * (np.cos(v - ab) / w) ** ((1 - alpha) / alpha))


def _poisson_sum(model, counts, rng):
    p = model.p
    if "s2" in p:
        s2 = p["s2"]
        return rng.normal(-counts * s2 / 2, np.sqrt(counts * s2))
    logs = np.log(np.asarray(p["atoms"]))
    total = int(counts.sum())
    idx = rng.choice(len(logs), size=total, p=np.asarray(p["probs"]))
    owner = np.repeat(np.arange(counts.size), counts.ravel())
    return np.bincount(owner, weights=logs[idx], minlength=counts.size).reshape(counts.shape)


def sample_id(model, mu, size, rng):
    """Draw ``P(A)`` with ``mu(A) = mu`` (scalar or array broadcast to ``size``)."""
    p = model.p
    if model.family == LOGNORMAL:
        lam2 = p["lambda2"]
        if np.ndim(mu) == 0:
            return rng.normal(-lam2 * mu / 2, np.sqrt(lam2 * mu), size)
        mu = np.broadcast_to(np.asarray(mu, dtype=float), size)
        return rng.normal(-lam2 * mu / 2, np.sqrt(lam2 * mu))
    mu = np.broadcast_to(np.asarray(mu, dtype=float), size)
    if model.family == POISSON:
        if model.log_base == BASE2:
            raise InvalidModel("a base-2 Poisson model describes cascade weights, not a random measure")
        counts = rng.poisson(mu)
        return _poisson_sum(model, counts, rng)
    alpha, sigma = p["alpha"], p["sigma"]
    kappa = sigma ** alpha * mu
    scale = (kappa * abs(math.cos(math.pi * alpha / 2))) ** (1 / alpha)
    x = scale * stable_skewed_left(alpha, size, rng)
    return x + kappa if model.family == STABLE_SUB else x - kappa


def sample_log_weights(model, size, rng):
    """``log W`` for dyadic cascade weights with ``log2 E[W^q] = psi(q)``.

    Base-2 Poisson models describe W directly.  Every other family realises
    ``W = exp(P(A))`` for a set of measure ``log 2``, which turns the
    natural-log Laplace identity into the base-2 one.
    """
    if model.family == POISSON:
        if model.log_base != BASE2:
            raise InvalidModel("cascade weights need a base-2 Poisson model")
        p = model.p
        if "s2" in p:
            s2 = p["s2"]
            return rng.normal(-s2 / 2, math.sqrt(s2), size)
        logs = np.log(np.asarray(p["atoms"]))
        return logs[rng.choice(len(logs), size=size, p=np.asarray(p["probs"]))]
    if model.family == LOGNORMAL and model.p["lambda2"] == 0:
        return np.zeros(size)
    return sample_id(model, math.log(2), size, rng)
