"""Replicated experiments: consistency, normality, rates and covariance decay."""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import kolmogorov, ndtr

from .cascade import sample_cascade
from .errors import ConditionViolated, ReplicationError, TooFewSamples
from .estimators import (CASCADE, MRM, MRW_H, MRW_HALF, asymptotic_rate, differences,
                         structure_function, zeta_hat, zeta_tilde)
from .grid import MixedGrid
from .mrm import sample_mrm
from .mrw import conditional_variances, sample_mrw
from .scaling import critical_exponents, psi, zeta, zeta_h
from .streams import Streams, as_streams

MIN_REPLICATIONS = 50


def theorem_process(config):
    """Limit theorem that governs ``config``: cascade, mrm, mrw_half or mrw_h."""
    if config.process == "cascade":
        return CASCADE
    if config.process == "mrm":
        return MRM
    return MRW_HALF if config.H == 0.5 else MRW_H


def truth(config, q):
    if config.process == "mrw":
        return float(zeta_h(config.model, config.H, q))
    return float(zeta(config.model, q))


def simulate(config, grid, streams):
    """One realization of the configured process on ``grid``."""
    if config.process == "cascade":
        return sample_cascade(config.model, grid, config.depth_extra, streams)
    if config.process == "mrm":
        return sample_mrm(config.model, grid, config.oversample, streams)
    return sample_mrw(config.model, config.H, grid, config.oversample, streams)


@dataclass
class McReport:
    """Monte Carlo summary of one estimator at one moment and level."""

    estimator: str
    q: float
    n: int
    R: int
    truth: float
    mean: float
    bias: float
    variance: float
    samples: np.ndarray
    standardized: np.ndarray
    ks_stat: float
    ks_pvalue: float
    rate_theory: float = math.nan
    rate_slope: float = math.nan
    wall_clock: float = 0.0

    def as_dict(self, with_samples=True):
        def num(v):
            return None if v is None or not np.isfinite(v) else float(v)
        out = {"estimator": self.estimator, "q": self.q, "n": self.n, "R": self.R,
               "truth": num(self.truth), "mean": num(self.mean), "bias": num(self.bias),
               "variance": num(self.variance), "ks_stat": num(self.ks_stat),
               "ks_pvalue": num(self.ks_pvalue), "rate_theory": num(self.rate_theory),
               "rate_slope": num(self.rate_slope), "wall_clock": self.wall_clock}
        if with_samples:
            out["samples"] = [float(v) for v in self.samples]
        return out


def ks_normal_test(samples, standardize=True):
    """One-sample Kolmogorov-Smirnov test against the standard normal.

    With ``standardize`` the samples are first centred and scaled by their
    sample mean and standard deviation (a constant sample maps to zeros).
    The p-value is the asymptotic Kolmogorov tail at ``sqrt(n) D``.
    """
    x = np.asarray(samples, dtype=float).ravel()
    n = x.size
    if n < MIN_REPLICATIONS:
        raise TooFewSamples(f"need at least {MIN_REPLICATIONS} samples, got {n}")
    if standardize:
        x = _studentize(x)
    cdf = ndtr(np.sort(x))
    i = np.arange(1, n + 1)
    d = max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n))
    return float(d), float(kolmogorov(math.sqrt(n) * d))


def _studentize(x):
    sd = x.std(ddof=1)
    if sd == 0 or not np.isfinite(sd):
        return np.zeros_like(x)
    return (x - x.mean()) / sd


def summarize(samples, truth, rate=math.nan, n=0, q=math.nan, estimator="zeta_tilde",
              wall_clock=0.0):
    x = np.asarray(samples, dtype=float)
    # shifting by the first sample keeps a constant batch exactly unbiased
    mean = float(x[0] + math.fsum(x - x[0]) / x.size)
    var = math.fsum((x - mean) ** 2) / (x.size - 1) if x.size > 1 else 0.0
    std = (x - mean) / math.sqrt(var) if var > 0 else np.zeros_like(x)
    if x.size >= MIN_REPLICATIONS:
        ks, p = ks_normal_test(std, standardize=False)
    else:
        ks, p = math.nan, math.nan
    return McReport(estimator, float(q), int(n), int(x.size), float(truth), mean,
                    mean - truth, var, x, std, ks, p, float(rate), math.nan, wall_clock)


@dataclass
class Replications:
    """Raw estimator values of ``R`` independent replications at level ``n``."""

    process: str
    n: int
    q: np.ndarray
    truth: np.ndarray
    rate_theory: np.ndarray
    zeta_tilde: np.ndarray
    zeta_hat: np.ndarray
    wall_clock: float
    seed: int

    @property
    def R(self):
        return self.zeta_tilde.shape[0]

    def report(self, estimator="zeta_tilde", q=None):
        r = 0 if q is None else int(np.flatnonzero(np.isclose(self.q, q))[0])
        samples = getattr(self, estimator)[:, r]
        return summarize(samples, self.truth[r], self.rate_theory[r], self.n, self.q[r],
                         estimator, self.wall_clock)

    def reports(self):
        return [self.report(e, q) for e in ("zeta_tilde", "zeta_hat") for q in self.q]


def _one_replication(config, grid, n, streams):
    real = simulate(config, grid, streams)
    table = structure_function(real, config.q_list, [n, n + 1])
    return ([zeta_tilde(table, n, q) for q in config.q_list],
            [zeta_hat(table, n, q) for q in config.q_list])


def run_replications(config, R=None, threads=1, n=None):
    """Run ``R`` independent replications of ``config`` at estimation level ``n``.

    Replication ``r`` draws from the streams keyed ``(n, r, block, purpose)``
    under the master seed, and results land in indexed slots, so the output is
    identical for any ``threads``.
    """
    R = config.R if R is None else R
    n = config.n if n is None else n
    if R < MIN_REPLICATIONS:
        raise TooFewSamples(f"R must be >= {MIN_REPLICATIONS}")
    grid = MixedGrid.for_estimation(n, config.chi, config.T)
    root = Streams(config.master_seed).child(n)
    q = np.asarray(config.q_list, dtype=float)
    tilde = np.empty((R, q.size))
    hat = np.empty((R, q.size))

    def work(r):
        try:
            tilde[r], hat[r] = _one_replication(config, grid, n, root.child(r))
        except Exception as exc:
            raise ReplicationError(r, exc) from exc

    start = time.perf_counter()
    if threads <= 1:
        for r in range(R):
            work(r)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(R)))
    elapsed = time.perf_counter() - start

    process = theorem_process(config)
    rates = np.full(q.size, np.nan)
    for i, qq in enumerate(q):
        try:
            rates[i] = asymptotic_rate(config.model, process, qq, config.chi, config.H)
        except ConditionViolated:
            pass
    return Replications(config.process, n, q, np.array([truth(config, v) for v in q]),
                        rates, tilde, hat, elapsed, config.master_seed)


def rate_regression(variances):
    """Least-squares slope of ``log2 var`` against ``n``; ``variances`` maps n to a variance."""
    if len(variances) < 4:
        raise TooFewSamples("rate regression needs at least 4 levels")
    ns = np.array(sorted(variances), dtype=float)
    y = np.log2([variances[k] for k in sorted(variances)])
    x = ns - ns.mean()
    return float(x @ (y - y.mean()) / (x @ x))


@dataclass
class RateStudy:
    levels: list
    runs: dict
    slopes: np.ndarray
    theory: np.ndarray

    def variances(self, r=0, estimator="zeta_tilde"):
        return {n: float(getattr(run, estimator)[:, r].var(ddof=1)) for n, run in self.runs.items()}


def run_rate_study(config, levels=None, R=None, threads=1):
    """Replications at several levels and the fitted variance-decay slope per q."""
    levels = list(config.levels if levels is None else levels)
    runs = {n: run_replications(config, R, threads, n) for n in levels}
    q = np.asarray(config.q_list, dtype=float)
    slopes = np.array([rate_regression({n: float(run.zeta_tilde[:, i].var(ddof=1))
                                        for n, run in runs.items()}) for i in range(q.size)])
    theory = -2 * runs[levels[0]].rate_theory
    return RateStudy(levels, runs, slopes, theory)


# ---------------------------------------------------------------------------

@dataclass
class CovarianceDecay:
    k: np.ndarray
    cov: np.ndarray
    stderr: np.ndarray
    exponent: float
    bound: float
    vanishing: bool = False
    meta: dict = field(default_factory=dict)

    def partial_sums(self):
        return np.cumsum(np.abs(self.cov))


def _lag_products(x, lags):
    """Per-row averages over positions of ``x_i x_{i+k}``, one column per lag."""
    out = np.empty((x.shape[0], len(lags)))
    for t, k in enumerate(lags):
        out[:, t] = (x[:, :x.shape[1] - k] * x[:, k:]).mean(axis=1)
    return out


def covariance_decay(model, process, q, n, k_list, R, oversample=3, rng=0, H=0.65,
                     chunk=128):
    """Scaled lag covariances of the centred dyadic differences and their decay exponent.

    ``process="mrm"`` uses ``D = M^q(parent) - 2^(zeta(q)-1) (M^q(left) + M^q(right))``
    at level ``n`` scaled by ``2^(n zeta(2q))``; ``process="mrw_sigma"`` uses the
    conditional-standard-deviation analogue ``U`` of the walk with Hurst index ``H``.
    Covariances are averaged over all positions of each of ``R`` independent blocks.
    The exponent is the least-squares slope of ``log|cov|`` on ``log k``;
    when every covariance is exactly zero it is ``-inf`` and ``vanishing`` is set.
    """
    if process not in ("mrm", "mrw_sigma"):
        raise ValueError("process must be 'mrm' or 'mrw_sigma'")
    crit = critical_exponents(model, 0.0)
    if not 2 * q < crit.q_max:
        raise ConditionViolated(f"2q ≥ q_max = {crit.q_max:.4g} (2q = {2 * q:g})")
    k_list = np.asarray(k_list, dtype=int)
    if k_list.min() < 1 or k_list.max() > 2 ** (n - 1):
        raise ValueError(f"lags must lie in [1, {2 ** (n - 1)}]")
    root = as_streams(rng).child(n)
    lags = np.concatenate([[0], k_list])
    prods, means = [], []
    for c, start in enumerate(range(0, R, chunk)):
        rows = min(chunk, R - start)
        grid = MixedGrid(n + 1, 0.0, 1.0, rows)
        mrm = sample_mrm(model, grid, oversample, root.child(c))
        if process == "mrm":
            tau = float(zeta(model, q)) - 1
            x = differences(mrm, q, tau) * 2.0 ** (n * float(zeta(model, 2 * q)))
        else:
            tau = float(zeta_h(model, H, q)) - 1
            a_fine = conditional_variances(mrm, H, n + 1) ** (q / 2)
            a_coarse = conditional_variances(mrm, H, n) ** (q / 2)
            x = (2.0 ** tau * (a_fine[:, 0::2] + a_fine[:, 1::2]) - a_coarse)
            x = x * 2.0 ** (n * float(zeta_h(model, H, 2 * q)))
        prods.append(_lag_products(x, lags))
        means.append(x.mean(axis=1))
    prods = np.concatenate(prods)
    mean = np.concatenate(means).mean()
    # the differences are centred in the continuum limit; the fine-mesh
    # approximation leaves a small mean that is removed here
    cov = prods.mean(axis=0) - mean ** 2
    se = prods.std(axis=0, ddof=1) / math.sqrt(R)
    bound = -(float(psi(model, 2 * q) - 2 * psi(model, q)) + 1)
    nz = cov[1:] != 0
    if not np.any(nz):
        exponent, vanishing = -math.inf, True
    else:
        lx = np.log(k_list[nz].astype(float))
        ly = np.log(np.abs(cov[1:][nz]))
        xc = lx - lx.mean()
        exponent, vanishing = float(xc @ (ly - ly.mean()) / (xc @ xc)), False
    return CovarianceDecay(k_list, cov[1:], se[1:], exponent, bound, vanishing,
                           {"variance": float(cov[0]), "process": process, "q": q, "n": n,
                            "R": R})
