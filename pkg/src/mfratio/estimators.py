"""Structure functions and the log-scale and ratio estimators of zeta(q)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConditionViolated, DegenerateSample, ShapeError
from .grid import _pairwise
from .mrw import check_walk
from .scaling import critical_exponents, psi
from .streams import as_streams

CASCADE = "cascade"
MRM = "mrm"
MRW_HALF = "mrw_half"
MRW_H = "mrw_h"
PROCESSES = (CASCADE, MRM, MRW_HALF, MRW_H)

TINY = 1e-300


def abs_power(x, q):
    """``|x|^q`` as ``exp(q log|x|)``, with exact zeros mapped to ``0**q`` (``1`` at ``q = 0``)."""
    a = np.abs(np.asarray(x, dtype=float))
    zero = a == 0
    if np.any((a < TINY) & ~zero):
        raise DegenerateSample("increment magnitude below 1e-300")
    with np.errstate(divide="ignore"):
        out = np.exp(q * np.log(np.where(zero, 1.0, a)))
    if np.any(zero):
        out = np.where(zero, 1.0 if q == 0 else 0.0, out)
    return out


@dataclass
class StructureTable:
    """``S[i, r]`` is the structure function at ``levels[i]`` and ``q_list[r]``."""

    q_list: np.ndarray
    levels: np.ndarray
    S: np.ndarray
    L: int
    chi: float
    n: int

    def index(self, m, q):
        i = np.flatnonzero(self.levels == m)
        r = np.flatnonzero(np.isclose(self.q_list, q, rtol=0, atol=1e-12))
        if i.size == 0:
            raise KeyError(f"level {m} not in table")
        if r.size == 0:
            raise KeyError(f"q = {q} not in table")
        return int(i[0]), int(r[0])

    def value(self, m, q):
        i, r = self.index(m, q)
        return float(self.S[i, r])


def _normalise_levels(n, levels):
    if levels is None:
        levels = [n - 1, n] if n >= 1 else [n]
    levels = np.array(sorted(set(int(m) for m in levels)))
    if levels.size and (levels.min() < 0 or levels.max() > n):
        raise ShapeError(f"levels must lie in [0, {n}]")
    return levels


def unit_structure(values, q_list, levels, n):
    """Per-row structure functions of a 2-D array of finest-level increments.

    Returns an array ``(rows, len(levels), len(q_list))``.  Coarser levels are
    always recomputed from aggregated increments.
    """
    out = np.empty((values.shape[0], len(levels), len(q_list)))
    current, level = values, n
    for i in range(len(levels) - 1, -1, -1):
        m = levels[i]
        current = _pairwise(current, level - m)
        level = m
        for r, q in enumerate(q_list):
            out[:, i, r] = abs_power(current, q).sum(axis=1)
    return out


def structure_function(real, q_list, levels=None):
    """Structure functions of ``real`` at each requested level and moment."""
    q_list = np.atleast_1d(np.asarray(q_list, dtype=float))
    if np.any(q_list < 0) or not np.all(np.isfinite(q_list)):
        raise ValueError("q values must be finite and >= 0")
    levels = _normalise_levels(real.grid.n, levels)
    per_block = unit_structure(real.values, q_list, levels, real.grid.n)
    S = np.array([[math.fsum(col) for col in per_block[:, i, :].T]
                  for i in range(len(levels))]).reshape(len(levels), len(q_list))
    return StructureTable(q_list, levels, S, real.grid.L, real.grid.chi, real.grid.n)


def zeta_tilde(table, m, q):
    """Ratio estimator ``1 + log2(S_m / S_{m+1})``."""
    a, b = table.value(m, q), table.value(m + 1, q)
    if a <= 0 or b <= 0:
        raise DegenerateSample("structure function vanishes")
    return 1 + math.log2(a / b)


def zeta_hat(table, m, q):
    """Log-scale estimator with the block-count correction, ``1 + (log2 L - log2 S_m) / m``."""
    a = table.value(m, q)
    if a <= 0:
        raise DegenerateSample("structure function vanishes")
    if m == 0:
        raise ShapeError("zeta_hat needs m >= 1")
    return 1 + (math.log2(table.L) - math.log2(a)) / m


def asymptotic_rate(model, process, q, chi, H=None):
    """Exponent ``r`` such that ``2^(n r) (zeta_tilde - zeta)`` has a normal limit.

    The moment condition of the matching limit theorem is enforced:
    ``2q < q_chi`` (cascade), ``4q < q_chi`` (measure, walk with H > 1/2),
    ``q < q_chi`` (walk with H = 1/2).
    """
    if process not in PROCESSES:
        raise ValueError(f"unknown process {process!r}")
    q_chi = critical_exponents(model, chi).q_chi
    factor = {CASCADE: 2, MRM: 4, MRW_HALF: 1, MRW_H: 4}[process]
    if not factor * q < q_chi:
        label = "q" if factor == 1 else f"{factor}q"
        raise ConditionViolated(f"{label} ≥ q_χ = {q_chi:.4g} ({label} = {factor * q:g})")
    if process == MRW_H:
        if H is None or not 0.5 < H < 0.75:
            raise ConditionViolated(f"1/2 < H < 3/4 required, got H = {H}")
        check_walk(model, H)
    if process == MRW_HALF:
        return chi / 2 + float(psi(model, q / 2)) - float(psi(model, q)) / 2 + 0.5
    return (1 + chi + 2 * float(psi(model, q)) - float(psi(model, 2 * q))) / 2


def differences(real, q, tau):
    """``M^q(parent) - 2^tau (M^q(left) + M^q(right))`` at level ``n - 1``.

    Returns an array ``(L, 2^(n-1))``; ``tau`` is normally ``zeta(q) - 1``.
    """
    child = np.abs(real.values)
    parent = _pairwise(child, 1)
    cq = np.power(child, q)
    return np.power(parent, q) - 2.0 ** tau * (cq[:, 0::2] + cq[:, 1::2])


# ---------------------------------------------------------------------------

@dataclass
class EstimateReport:
    q: np.ndarray
    zeta: np.ndarray
    zeta_tilde: np.ndarray
    zeta_hat: np.ndarray
    rate_exponent: np.ndarray
    std_error: np.ndarray
    method: str
    meta: dict = field(default_factory=dict)

    def as_dict(self):
        def listify(a):
            return [None if not np.isfinite(v) else float(v) for v in np.asarray(a, dtype=float)]
        return {"q": listify(self.q), "zeta": listify(self.zeta),
                "zeta_tilde": listify(self.zeta_tilde), "zeta_hat": listify(self.zeta_hat),
                "rate_exponent": listify(self.rate_exponent), "stderr": listify(self.std_error),
                "method": self.method, "meta": self.meta}


def _estimates(S, levels, L, method):
    """Estimates per q from a stack of tables ``S[..., level, q]``."""
    logS = np.log2(S)
    pairs = logS[..., :-1, :] - logS[..., 1:, :]
    tilde = 1 + pairs.mean(axis=-2)
    hat = 1 + (math.log2(L) - logS[..., -1, :]) / levels[-1]
    if method == "ratio":
        est = tilde
    else:
        x = levels - levels.mean()
        slope = np.einsum("i,...iq->...q", x, logS) / (x @ x)
        est = 1 - slope
    return est, tilde, hat


def zeta_curve(real, q_grid, level_range=None, method="ratio", n_boot=200, rng=0,
               model=None, process=None, H=None):
    """Estimate the scaling function of a sampled or ingested series.

    ``level_range = (lo, hi)`` selects the dyadic levels used; the ratio
    method averages the ratio estimator over the pairs ``(m, m+1)`` with
    ``lo <= m < hi``, the regression method fits ``log2 S`` against the level.
    Standard errors come from a bootstrap over independent blocks, or over
    the level-``lo`` sub-intervals when the data has a single block.
    """
    if method not in ("ratio", "regression"):
        raise ValueError("method must be 'ratio' or 'regression'")
    n = real.grid.n
    lo, hi = level_range if level_range is not None else (n - 1, n)
    if not 0 <= lo < hi <= n:
        raise ShapeError(f"level range ({lo}, {hi}) must satisfy 0 <= lo < hi <= {n}")
    if method == "regression" and hi - lo < 1:
        raise ShapeError("regression needs at least two levels")
    q_grid = np.atleast_1d(np.asarray(q_grid, dtype=float))
    levels = np.arange(lo, hi + 1)

    if real.grid.L >= 2:
        units = unit_structure(real.values, q_grid, levels, n)
    else:
        if lo < 1:
            raise ShapeError("single-block bootstrap needs level_range lo >= 1")
        chunks = real.values.reshape(2 ** lo, -1)
        units = unit_structure(chunks, q_grid, levels - lo, n - lo)
    S = units.sum(axis=0)
    est, tilde, hat = _estimates(S, levels, real.grid.L, method)

    gen = as_streams(rng).generator("bootstrap")
    U = units.shape[0]
    idx = gen.integers(0, U, size=(n_boot, U))
    boot = np.stack([units[i].sum(axis=0) for i in idx])
    with np.errstate(divide="ignore", invalid="ignore"):
        b_est, _, _ = _estimates(boot, levels, real.grid.L, method)
    se = np.nanstd(b_est, axis=0, ddof=1)

    rate = np.full(q_grid.shape, np.nan)
    if model is not None and process is not None:
        for r, q in enumerate(q_grid):
            try:
                rate[r] = asymptotic_rate(model, process, q, real.grid.chi, H)
            except ConditionViolated:
                pass
    return EstimateReport(q_grid, est, tilde, hat, rate, se, method,
                          {"levels": [int(lo), int(hi)], "L": real.grid.L, "n": n,
                           "bootstrap": n_boot})
