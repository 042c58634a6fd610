import math

import numpy as np
import pytest
from scipy import stats

from mfratio import ScalingModel, psi, sample_id, sample_log_weights, stable_skewed_left
from mfratio.errors import InvalidModel
from mfratio.scaling import BASE2


def gen(seed=0):
    return np.random.default_rng(seed)


def mc_laplace(x, q):
    v = np.exp(q * x)
    return v.mean(), v.std() / math.sqrt(x.size)


@pytest.mark.parametrize("model", [ScalingModel.lognormal(0.3), ScalingModel.poisson_lognormal(0.2),
                                   ScalingModel.poisson_discrete([0.5, 1.5], [0.5, 0.5]),
                                   ScalingModel.stable(0.6, 0.4), ScalingModel.stable(1.5, 0.4)],
                         ids=lambda m: m.describe())
def test_laplace_identity(model):
    mu = 0.7
    x = sample_id(model, mu, 400_000, gen(1))
    for q in (0.5, 1.0, 1.5):
        mean, se = mc_laplace(x, q)
        target = math.exp(float(psi(model, q)) * mu)
        assert abs(mean - target) < 5 * se + 1e-3


def test_stable_matches_scipy():
    # the S1 form used here corresponds to scipy's default parameterisation
    for alpha in (0.6, 1.5):
        x = stable_skewed_left(alpha, 4000, gen(2))
        y = stats.levy_stable.rvs(alpha, -1.0, size=4000, random_state=3)
        assert stats.ks_2samp(x, y).pvalue > 0.001


def test_stable_laplace_closed_form():
    alpha = 1.5
    x = stable_skewed_left(alpha, 400_000, gen(4))
    mean, se = mc_laplace(x, 0.5)
    assert abs(mean - math.exp(-0.5 ** alpha / math.cos(math.pi * alpha / 2))) < 5 * se


def test_array_mu_broadcast():
    m = ScalingModel.lognormal(0.2)
    x = sample_id(m, np.array([0.1, 1.0, 10.0]), (50_000, 3), gen(5))
    assert np.allclose(x.var(axis=0), 0.2 * np.array([0.1, 1.0, 10.0]), rtol=0.05)


def test_cascade_weights_have_unit_mean():
    for m in (ScalingModel.lognormal(0.2, BASE2), ScalingModel.stable(1.5, 0.3, BASE2),
              ScalingModel.poisson_discrete([0.5, 1.5], [0.5, 0.5], BASE2)):
        w = np.exp(sample_log_weights(m, 400_000, gen(6)))
        assert w.mean() == pytest.approx(1.0, abs=5 * w.std() / math.sqrt(w.size))
        w2 = (w ** 2).mean()
        assert math.log2(w2) == pytest.approx(float(psi(m, 2.0)), abs=0.02)


def test_degenerate_weights():
    assert np.all(sample_log_weights(ScalingModel.lognormal(0.0, BASE2), 10, gen()) == 0)
    with pytest.raises(InvalidModel):
        sample_log_weights(ScalingModel.poisson_lognormal(0.1), 10, gen())
    with pytest.raises(InvalidModel):
        sample_id(ScalingModel.poisson_lognormal(0.1, BASE2), 1.0, 10, gen())
