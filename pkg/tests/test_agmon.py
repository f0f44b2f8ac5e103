import numpy as np
import pytest
from numpy.testing import assert_allclose

from utils.agmon import MIN_SAMPLES, agmon_samples, disc_agmon_fit, fit_agmon, flat_agmon_fit
from utils.cover_kernels import fock_unitary
from utils.errors import PreconditionError


def test_exact_line_is_recovered():
    x = np.arange(1.0, 11.0)
    fit = fit_agmon(x, 2.0 * x + 1.0)
    assert_allclose([fit["beta_hat"], fit["intercept"], fit["r_squared"]], [2.0, 1.0, 1.0])
    assert fit["rms_residual"] < 1e-12


def test_too_few_samples_are_refused():
    x = np.arange(1.0, MIN_SAMPLES)
    with pytest.raises(PreconditionError):
        fit_agmon(x, x)
    with pytest.raises(PreconditionError):
        fit_agmon(np.ones(10), np.arange(10.0))


def test_samples_need_distance_one():
    with pytest.raises(PreconditionError):
        agmon_samples(fock_unitary, [1, 2], [0.5, 1.0], complex)


def test_flat_fit_is_steep():
    fit = flat_agmon_fit([1, 2, 4, 8, 16], [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0])
    assert fit["samples"] == 35
    assert fit["beta_hat"] > 1.0


def test_disc_fit_is_positive():
    fit = disc_agmon_fit([2, 3, 4, 5, 6, 7, 8], [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0])
    assert fit["samples"] == 49
    assert fit["beta_hat"] > 0
