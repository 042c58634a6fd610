"""Log-Laplace functions, scaling functions and critical moment exponents.

Every model is described by the log-Laplace transform ``psi`` of its driving
infinitely divisible law, normalised so that ``psi(0) = psi(1) = 0``.  The
scaling function of a measure is then ``zeta(q) = q - psi(q)``.

Two logarithm conventions coexist.  Dyadic cascades use base 2
(``zeta(q) = q - log2 E[W^q]``) while the cone-based random measures use the
natural logarithm.  A :class:`ScalingModel` carries its convention explicitly.
A log-normal model is parameterised by its intermittency ``lambda2`` so that
``psi(q) = lambda2 * q * (q - 1) / 2`` in both conventions.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, InvalidModel, ModelUnusable

LOGNORMAL = "lognormal"
POISSON = "poisson"
STABLE_SUB = "stable_sub"
STABLE_SUPER = "stable_super"
FAMILIES = (LOGNORMAL, POISSON, STABLE_SUB, STABLE_SUPER)

BASE2 = "base2"
NATURAL = "natural"

MAX_ATOMS = 64
Q_CAP = 1e6


@dataclass(frozen=True)
class ScalingModel:
    """A psi family with its parameters.

    Use the ``lognormal``, ``poisson_discrete``, ``poisson_lognormal`` and
    ``stable`` constructors rather than building instances by hand.

    Parameters held in ``params`` by family:

    * ``lognormal``: ``lambda2``
    * ``poisson``: either ``atoms`` and ``probs`` (discrete law of W) or
      ``s2`` (variance of log W for a log-normal W with E[W] = 1)
    * ``stable_sub`` / ``stable_super``: ``alpha``, ``sigma``
    """

    family: str
    params: tuple = field(default=())
    log_base: str = NATURAL

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidModel(f"unknown family {self.family!r}")
        if self.log_base not in (BASE2, NATURAL):
            raise InvalidModel(f"unknown log base {self.log_base!r}")

    # constructors -------------------------------------------------------
    @classmethod
    def lognormal(cls, lambda2, log_base=NATURAL):
        lambda2 = float(lambda2)
        if not lambda2 >= 0:
            raise InvalidModel("lambda2 must be >= 0")
        return cls(LOGNORMAL, (("lambda2", lambda2),), log_base)

    @classmethod
    def poisson_discrete(cls, atoms, probs, log_base=NATURAL):
        atoms = tuple(float(a) for a in atoms)
        probs = tuple(float(p) for p in probs)
        if len(atoms) != len(probs) or not atoms:
            raise InvalidModel("atoms and probs must have the same nonzero length")
        if len(atoms) > MAX_ATOMS:
            raise InvalidModel(f"at most {MAX_ATOMS} atoms are supported")
        if min(atoms) <= 0:
            raise InvalidModel("atoms of W must be > 0 (psi(0) = 0 needs P(W > 0) = 1)")
        if min(probs) < 0 or abs(math.fsum(probs) - 1) > 1e-12:
            raise InvalidModel("probs must be a probability vector")
        mean = math.fsum(a * p for a, p in zip(atoms, probs))
        if abs(mean - 1) > 1e-12:
            raise InvalidModel(f"E[W] must equal 1, got {mean!r}")
        return cls(POISSON, (("atoms", atoms), ("probs", probs)), log_base)

    @classmethod
    def poisson_lognormal(cls, s2, log_base=NATURAL):
        s2 = float(s2)
        if not s2 >= 0:
            raise InvalidModel("s2 must be >= 0")
        return cls(POISSON, (("s2", s2),), log_base)

    @classmethod
    def stable(cls, alpha, sigma, log_base=NATURAL):
        alpha, sigma = float(alpha), float(sigma)
        if not sigma > 0:
            raise InvalidModel("sigma must be > 0")
        if 0 < alpha < 1:
            family = STABLE_SUB
        elif 1 < alpha < 2:
            family = STABLE_SUPER
        else:
            raise InvalidModel("alpha must lie in (0, 1) or (1, 2)")
        return cls(family, (("alpha", alpha), ("sigma", sigma)), log_base)

    # -------------------------------------------------------------------
    @property
    def p(self):
        return dict(self.params)

    @property
    def is_degenerate(self):
        """True when psi is identically zero (Lebesgue measure)."""
        p = self.p
        if self.family == LOGNORMAL:
            return p["lambda2"] == 0
        if self.family == POISSON:
            if "s2" in p:
                return p["s2"] == 0
            return all(a == 1 for a, pr in zip(p["atoms"], p["probs"]) if pr > 0)
        return False

    def describe(self):
        p = self.p
        if self.family == LOGNORMAL:
            return f"lognormal(lambda2={p['lambda2']:g}, {self.log_base})"
        if self.family == POISSON:
            if "s2" in p:
                return f"poisson(lognormal W, s2={p['s2']:g}, {self.log_base})"
            return f"poisson({len(p['atoms'])} atoms, {self.log_base})"
        return f"{self.family}(alpha={p['alpha']:g}, sigma={p['sigma']:g})"


@dataclass(frozen=True)
class CriticalExponents:
    q_max: float
    q_0: float
    q_chi: float
    chi: float


def _check_domain(model, q):
    q = np.asarray(q, dtype=float)
    if model.family in (STABLE_SUB, STABLE_SUPER) and np.any(q < 0):
        raise DomainError("stable families have infinite moments for q < 0")
    if not np.all(np.isfinite(q)):
        raise DomainError("q must be finite")
    return q


def _poisson_moments(model, q):
    """E[W^q] and E[W^q log W] for the W-law of a Poisson model."""
    p = model.p
    if "s2" in p:
        s2 = p["s2"]
        ew = np.exp(s2 * q * (q - 1) / 2)
        # d/dq E[W^q] = E[W^q log W]
        return ew, ew * s2 * (q - 0.5)
    atoms = np.asarray(p["atoms"])
    probs = np.asarray(p["probs"])
    logs = np.log(atoms)
    qq = np.asarray(q)[..., None]
    terms = probs * np.exp(qq * logs)
    return terms.sum(-1), (terms * logs).sum(-1)


def psi(model, q):
    """Log-Laplace transform of the model at ``q`` (scalar or array)."""
    q = _check_domain(model, q)
    p = model.p
    if model.family == LOGNORMAL:
        out = p["lambda2"] * q * (q - 1) / 2
    elif model.family == POISSON:
        ew, _ = _poisson_moments(model, q)
        if model.log_base == BASE2:
            out = np.log2(ew)
        else:
            out = ew - 1
    elif model.family == STABLE_SUB:
        out = p["sigma"] ** p["alpha"] * (q - q ** p["alpha"])
    else:
        out = p["sigma"] ** p["alpha"] * (q ** p["alpha"] - q)
    return out[()] if isinstance(out, np.ndarray) else out


def psi_prime(model, q):
    q = _check_domain(model, q)
    p = model.p
    if model.family == LOGNORMAL:
        out = p["lambda2"] * (q - 0.5)
    elif model.family == POISSON:
        ew, ewlog = _poisson_moments(model, q)
        if model.log_base == BASE2:
            out = ewlog / (ew * math.log(2))
        else:
            out = ewlog
    else:
        a, s = p["alpha"], p["sigma"]
        with np.errstate(divide="ignore"):
            d = a * q ** (a - 1)
        out = s ** a * (1 - d) if model.family == STABLE_SUB else s ** a * (d - 1)
    return out[()] if isinstance(out, np.ndarray) else out


def zeta(model, q):
    """Scaling function of the measure, ``q - psi(q)``."""
    return np.asarray(q, dtype=float)[()] - psi(model, q)


def zeta_h(model, H, q):
    """Scaling function of the walk built on ``model`` with Hurst index ``H``.

    For ``H = 1/2`` the walk is a time-changed Brownian motion and its scaling
    function is ``zeta(q / 2)``; for ``H > 1/2`` it is ``q H - psi(q)``.
    """
    if not 0.5 <= H < 1:
        raise DomainError("H must lie in [1/2, 1)")
    q = np.asarray(q, dtype=float)[()]
    if H == 0.5:
        return zeta(model, q / 2)
    return q * H - psi(model, q)


def _legendre_gap(model, q):
    # q psi'(q) - psi(q), nondecreasing in q for convex psi
    return q * psi_prime(model, q) - psi(model, q)


def _root_above_one(f, infinite_test=None):
    """Smallest root of an increasing-past-one function ``f`` with f(1) < 0.

    Returns +inf when ``f`` stays negative up to ``Q_CAP``.
    """
    if infinite_test is not None and infinite_test():
        return math.inf
    # f may vanish at 1 itself (q_max); step just past it
    lo, eps = 1.0, 1e-3
    while eps > 1e-12 and f(1.0 + eps) >= 0:
        eps /= 10
    if f(1.0 + eps) < 0:
        lo = 1.0 + eps
    hi = max(2.0, 2 * lo)
    while f(hi) < 0:
        lo, hi = hi, hi * 2
        if hi > Q_CAP:
            warnings.warn("no root below 1e6, exponent declared infinite", RuntimeWarning)
            return math.inf
    if f(hi) == 0:
        return hi
    return brentq(f, lo, hi, xtol=1e-13, rtol=1e-15, maxiter=500)


def critical_exponents(model, chi=0.0):
    """Compute q_max, q_0 and q_chi for ``model`` under mixing exponent ``chi``.

    ``q_max`` solves ``zeta(q) = 1`` on ``(1, inf)``; ``q_0`` and ``q_chi``
    are where ``q psi'(q) - psi(q)`` crosses 1 and ``1 + chi``.

    Raises :class:`ModelUnusable` when ``psi'(1) >= 1``.
    """
    chi = float(chi)
    if chi < 0:
        raise DomainError("chi must be >= 0")
    d1 = psi_prime(model, 1.0)
    if d1 >= 1:
        raise ModelUnusable(f"psi'(1) = {d1:.6g} >= 1, q_max would be 1")
    if model.is_degenerate:
        return CriticalExponents(math.inf, math.inf, math.inf, chi)

    p = model.p

    def qmax_infinite():
        # psi(q) - (q - 1) -> -inf iff the linear coefficient wins
        if model.family == STABLE_SUB:
            return p["sigma"] ** p["alpha"] <= 1
        return False

    q_max = _root_above_one(lambda q: psi(model, q) - (q - 1), qmax_infinite)
    q_0 = _root_above_one(lambda q: _legendre_gap(model, q) - 1)
    q_chi = _root_above_one(lambda q: _legendre_gap(model, q) - 1 - chi)
    if not (1 < q_0 <= q_chi and q_0 < q_max):
        raise ArithmeticError(f"ordering 1 < q_0 < q_chi, q_0 < q_max violated: "
                              f"{q_0}, {q_chi}, {q_max}")
    return CriticalExponents(q_max, q_0, q_chi, chi)


def moment_gap(model, p, q, chi=None):
    """Return ``psi(p q) - p psi(q)``.

    When ``chi`` is given and ``p q < q_chi`` the convexity bound
    ``0 < gap < (p - 1)(1 + chi)`` is checked.
    """
    # q = 1 is admitted: the gap is then psi(p)
    if not (p > 1 and q >= 1):
        raise DomainError("moment_gap needs p > 1 and q >= 1")
    gap = float(psi(model, p * q) - p * psi(model, q))
    if chi is not None:
        q_chi = critical_exponents(model, chi).q_chi
        if p * q < q_chi and not (0 < gap < (p - 1) * (1 + chi)):
            raise AssertionError(f"convexity bound violated: gap={gap}, bound={(p - 1) * (1 + chi)}")
    return gap
