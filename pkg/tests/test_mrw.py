import math

import numpy as np
import pytest

from mfratio import (MixedGrid, ScalingModel, conditional_sigma, conditional_variances,
                     fgn_autocovariance, sample_fgn, sample_mrm, sample_mrw)
from mfratio.errors import InvalidH, ValidityError
from mfratio.mrw import gaussian_abs_moment
from oracles import fgn_gamma

LN = ScalingModel.lognormal(0.05)


def test_autocovariance_formula():
    for H in (0.5, 0.6, 0.75, 0.9):
        k = np.arange(40)
        assert np.allclose(fgn_autocovariance(H, k), [fgn_gamma(H, int(v)) for v in k], rtol=1e-14)
    assert np.allclose(fgn_autocovariance(0.5, np.arange(1, 5)), 0)


def test_fgn_sample_covariance():
    H = 0.7
    x = sample_fgn(H, 128, 0, rows=5000)
    for k in (0, 1, 5, 20):
        c = np.mean(x[:, :128 - k] * x[:, k:])
        assert c == pytest.approx(fgn_gamma(H, k), abs=0.03)


def test_fgn_shapes_and_errors():
    assert sample_fgn(0.5, 10, 1).shape == (10,)
    assert sample_fgn(0.8, 1, 1, rows=3).shape == (3, 1)
    with pytest.raises(InvalidH):
        sample_fgn(1.0, 10, 1)


def test_walk_gates():
    with pytest.raises(InvalidH):
        sample_mrw(LN, 0.4, MixedGrid(3), 2, 0)
    with pytest.raises(ValidityError):
        sample_mrw(ScalingModel.lognormal(0.4), 0.6, MixedGrid(3), 2, 0)


def test_half_walk_conditional_variance():
    grid = MixedGrid(5, 0, 1, 2)
    mrm = sample_mrm(LN, grid, 2, 1)
    dx = np.array([sample_mrw(LN, 0.5, grid, 2, s, mrm=mrm).values for s in range(2000)])
    ratio = dx.var(axis=0) / mrm.values
    assert ratio.mean() == pytest.approx(1.0, abs=0.02)


def test_h_walk_conditional_variance():
    H = 0.7
    grid = MixedGrid(4, 0, 1, 2)
    mrm = sample_mrm(LN, grid, 2, 3)
    dx = np.array([sample_mrw(LN, H, grid, 2, s, mrm=mrm).values for s in range(3000)])
    a2 = conditional_variances(mrm, H)
    assert np.allclose(dx.var(axis=0) / a2, 1.0, atol=0.12)
    assert (dx.var(axis=0) / a2).mean() == pytest.approx(1.0, abs=0.03)
    assert conditional_sigma(mrm, H, 1, 3) == pytest.approx(math.sqrt(a2[1, 3]), rel=1e-12)


def test_lebesgue_walk_is_fbm():
    H = 0.7
    grid = MixedGrid(4, 0, 1, 1)
    mrm = sample_mrm(ScalingModel.lognormal(0.0), grid, 3, 0)
    assert np.allclose(conditional_variances(mrm, H), grid.delta ** (2 * H), rtol=1e-12)
    assert np.allclose(conditional_variances(mrm, H, 2), (grid.delta * 4) ** (2 * H), rtol=1e-12)


def test_mismatched_mrm():
    mrm = sample_mrm(LN, MixedGrid(4), 2, 0)
    with pytest.raises(ValueError):
        sample_mrw(LN, 0.5, MixedGrid(5), 2, 0, mrm=mrm)


def test_gaussian_abs_moment():
    assert gaussian_abs_moment(2) == pytest.approx(1.0)
    assert gaussian_abs_moment(1) == pytest.approx(math.sqrt(2 / math.pi))
    assert gaussian_abs_moment(4) == pytest.approx(3.0)
