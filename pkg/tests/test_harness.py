import math

import numpy as np
import pytest
from scipy import stats

from mfratio import (ScalingModel, covariance_decay, ks_normal_test, parse_config, rate_regression,
                     run_replications, summarize)
from mfratio.errors import ConditionViolated, TooFewSamples

SMALL = """
process: cascade
family: lognormal
lambda2: 0.1
n: 5
chi: 0.5
q: [1, 2]
R: 50
depth_extra: 2
master_seed: 17
"""


def test_summarize_trivial():
    rep = summarize(np.full(60, 1.9), 1.9)
    assert rep.bias == 0 and rep.variance == 0
    assert np.all(rep.standardized == 0)


def test_summarize_shifted_normal():
    R = 400
    x = np.random.default_rng(0).normal(0.3, 1, R)
    rep = summarize(x, 0.0)
    assert abs(rep.bias - 0.3) < 3 / math.sqrt(R)
    assert rep.ks_pvalue > 0.01


def test_ks_against_scipy():
    x = np.random.default_rng(1).normal(size=300)
    d, p = ks_normal_test(x, standardize=False)
    ref = stats.kstest(x, "norm", method="asymp")
    assert d == pytest.approx(ref.statistic, rel=1e-12)
    assert p == pytest.approx(ref.pvalue, rel=1e-6)
    with pytest.raises(TooFewSamples):
        ks_normal_test(x[:10])


def test_ks_calibration():
    rng = np.random.default_rng(2)
    raw = sum(ks_normal_test(rng.normal(size=200), standardize=False)[1] < 0.05 for _ in range(100))
    assert 1 <= raw <= 12
    studentized = sum(ks_normal_test(rng.normal(size=200))[1] >= 0.05 for _ in range(100))
    assert studentized >= 90


def test_ks_detects_heavy_tails():
    x = np.random.default_rng(3).standard_t(2, 2000)
    assert ks_normal_test(x)[1] < 0.01


def test_rate_regression_exact():
    v = {n: 3.0 * 2.0 ** (-1.1 * n) for n in range(6, 12)}
    assert rate_regression(v) == pytest.approx(-1.1, abs=1e-12)
    with pytest.raises(TooFewSamples):
        rate_regression({1: 1.0, 2: 0.5})


def test_replications_deterministic_across_threads():
    cfg = parse_config(SMALL)
    a = run_replications(cfg, threads=1)
    b = run_replications(cfg, threads=3)
    assert np.array_equal(a.zeta_tilde, b.zeta_tilde)
    assert np.array_equal(a.zeta_hat, b.zeta_hat)
    assert np.all(np.abs(a.zeta_tilde[:, 0] - 1) < 1e-12)
    rep = a.report("zeta_tilde", 2.0)
    assert rep.R == 50 and rep.truth == pytest.approx(1.9)
    assert math.isfinite(rep.rate_theory)
    d = rep.as_dict()
    assert len(d["samples"]) == 50


def test_replications_need_enough_runs():
    with pytest.raises(TooFewSamples):
        run_replications(parse_config(SMALL), R=10)


def test_covariance_decay_degenerate_and_gated():
    m = ScalingModel.lognormal(0.2)
    c = covariance_decay(m, "mrm", 1.0, 6, [1, 2, 4], 64, rng=0)
    assert c.vanishing and c.exponent == -math.inf and np.all(c.cov == 0)
    with pytest.raises(ConditionViolated):
        covariance_decay(ScalingModel.lognormal(1.0), "mrm", 1.5, 6, [1], 64)
    c = covariance_decay(m, "mrw_sigma", 1.0, 6, [1, 2, 4, 8], 64, rng=0)
    assert not c.vanishing and c.partial_sums().shape == (4,)
