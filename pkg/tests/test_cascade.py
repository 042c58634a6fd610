import math

import numpy as np
import pytest

from mfratio import MixedGrid, ScalingModel, cascade_totals, sample_cascade, theoretical_V, zeta
from mfratio.errors import InvalidModel
from mfratio.scaling import BASE2

LN = ScalingModel.lognormal(0.1, BASE2)
DISCRETE = ScalingModel.poisson_discrete([0.6, 1.4], [0.5, 0.5], BASE2)


def test_degenerate_cascade_is_lebesgue():
    m = ScalingModel.lognormal(0.0, BASE2)
    r = sample_cascade(m, MixedGrid(5, 0, 2.0, 3), 4, 0)
    assert np.all(r.values == 2.0 / 32)


def test_depth_zero_totals():
    assert np.all(cascade_totals(LN, 10, 0, np.random.default_rng(0)) == 1)


def test_unit_mean_mass():
    r = sample_cascade(LN, MixedGrid(8, 0, 1, 200), 3, 1)
    totals = r.values.sum(axis=1)
    assert totals.mean() == pytest.approx(1.0, abs=4 * totals.std() / math.sqrt(200))


@pytest.mark.parametrize("model", [LN, DISCRETE], ids=["lognormal", "discrete"])
def test_second_moment_scaling(model):
    # E sum_k M(I_k)^2 = 2^(n (1 - zeta(2))) for the untruncated top tree
    n = 6
    r = sample_cascade(model, MixedGrid(n, 0, 1, 4000), 0, 2)
    s2 = (r.values ** 2).sum(axis=1)
    target = 2.0 ** (n * (1 - float(zeta(model, 2.0))))
    assert s2.mean() == pytest.approx(target, abs=4 * s2.std() / math.sqrt(s2.size))


def test_reproducible_and_block_keyed():
    a = sample_cascade(LN, MixedGrid(6, 0, 1, 3), 2, 11).values
    b = sample_cascade(LN, MixedGrid(6, 0, 1, 3), 2, 11).values
    c = sample_cascade(LN, MixedGrid(6, 0, 1, 5), 2, 11).values
    assert np.array_equal(a, b)
    assert np.array_equal(a, c[:3])
    assert not np.array_equal(a[0], a[1])


def test_rejects_degenerating_model():
    with pytest.raises(InvalidModel):
        sample_cascade(ScalingModel.lognormal(2.5, BASE2), MixedGrid(3), 2, 0)


def test_V_trivial_cases():
    v, se = theoretical_V(LN, 1.0, 10_000, 0, depth=6)
    assert v == pytest.approx(0, abs=1e-20)
    v, se = theoretical_V(ScalingModel.lognormal(0.0, BASE2), 2.0, 10_000, 0, depth=4)
    assert v == 0


def test_V_brute_force():
    # independent evaluation of the defining variance with numpy only
    q, depth, size = 2.0, 6, 20_000
    v, se = theoretical_V(LN, q, size, 3, depth=depth)
    rng = np.random.default_rng(99)
    s = 0.1 * math.log(2)

    def totals():
        logs = rng.normal(-s / 2, math.sqrt(s), (size, 2 ** depth * 2 - 2))
        out = np.zeros((size, 1))
        start = 0
        for lev in range(1, depth + 1):
            w = logs[:, start:start + 2 ** lev]
            start += 2 ** lev
            out = np.repeat(out, 2, axis=1) + w
        return np.exp(out).mean(axis=1)

    z1, z2 = totals(), totals()
    w1 = np.exp(rng.normal(-s / 2, math.sqrt(s), size))
    w2 = np.exp(rng.normal(-s / 2, math.sqrt(s), size))
    z0 = (z1 * w1 + z2 * w2) / 2
    c = 2.0 ** (float(zeta(LN, q)) - 1 - q)
    ref = np.var(z0 ** q - c * ((z1 * w1) ** q + (z2 * w2) ** q), ddof=1)
    assert v == pytest.approx(ref, rel=0.1)
    assert se > 0
