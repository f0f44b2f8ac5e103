import numpy as np
import pytest
from numpy.testing import assert_allclose

from experiments.exhaustion import l2_reproducing_residual
from experiments.invariants import disc_equivariance_defect
from objects.kernels import LiftedPoint
from objects.spaces import FlatModel
from utils.cover_kernels import (
    agmon_bound,
    disc_kernel,
    disc_unitary,
    flat_beta_margin,
    fock_kernel,
    fock_unitary,
    lift_kernel,
)
from utils.errors import DomainError, PreconditionError
from utils.hyperbolic import disc_distance, translation


def test_fock_norm_depends_on_distance_only(rng):
    tau = 0.2 + 1.5j
    z = rng.normal(size=6) + 1j * rng.normal(size=6)
    w = rng.normal(size=6) + 1j * rng.normal(size=6)
    for N in (1, 4):
        expected = (N / 1.5) * np.exp(-N * np.pi * np.abs(z - w) ** 2 / 3.0)
        assert_allclose(np.abs(fock_unitary(z, w, N, tau)), expected, rtol=1e-12)


def test_fock_kernel_is_hermitian():
    z, w = 0.3 + 0.8j, -1.1 + 0.2j
    k = fock_kernel(z, w, 3)
    assert_allclose(k.unitary, np.conj(fock_kernel(w, z, 3).unitary), rtol=1e-14)
    assert_allclose(k.density, 3 * np.exp(3 * np.pi * z * np.conj(w)), rtol=1e-14)
    assert_allclose(k.pointwise_norm, abs(k.unitary))


@pytest.mark.parametrize("N", [0, 1.5, -2])
def test_kernels_need_positive_integer_powers(N):
    with pytest.raises(PreconditionError):
        fock_kernel(0j, 0j, N)


@pytest.mark.parametrize("N", [1, 2])
def test_fock_kernel_reproduces_itself(N):
    space = FlatModel(1j)
    assert l2_reproducing_residual(space, 0.4 + 0.1j, N, 8.0) < 1e-10


def test_disc_norm_depends_on_distance_only(rng):
    z = 0.7 * rng.uniform(0, 1, 5) * np.exp(2j * np.pi * rng.uniform(0, 1, 5))
    w = 0.7 * rng.uniform(0, 1, 5) * np.exp(2j * np.pi * rng.uniform(0, 1, 5))
    for t in (2, 3):
        expected = 0.5 / np.cosh(0.5 * disc_distance(z, w)) ** (2 * t)
        assert_allclose(np.abs(disc_unitary(z, w, t)), expected, rtol=1e-12)


def test_disc_kernel_is_equivariant(disc_space):
    a, b = translation(1.3, 0.4)
    z, w = 0.2 + 0.3j, -0.4 + 0.1j
    t = 3
    cz = np.conj(b) * z + np.conj(a)
    cw = np.conj(b) * w + np.conj(a)
    phase = (cz / abs(cz)) ** (2 * t) * np.conj((cw / abs(cw)) ** (2 * t))
    gz = (a * z + b) / cz
    gw = (a * w + b) / cw
    assert_allclose(disc_unitary(gz, gw, t), phase * disc_unitary(z, w, t), rtol=1e-12)
    assert_allclose(disc_kernel(z, z, t).density, 0.5 / (1 - abs(z) ** 2) ** (2 * t))


def test_disc_kernel_is_equivariant_along_words(disc_space, disc_enumeration, rng):
    z = 0.5 * np.sqrt(rng.uniform(0, 1, 6)) * np.exp(2j * np.pi * rng.uniform(0, 1, 6))
    w = z[::-1]
    words = [(0, 1), (2, 7), (1, 3, 6), (5, 5, 2), (4, 1, 0, 6)]
    elements = [disc_space.group.word(word) for word in words]
    elements += [g for g in disc_enumeration if len(g.word) >= 2]
    t = 3
    for g in elements:
        phase = g.unitary_phase(z, t) * np.conj(g.unitary_phase(w, t))
        assert_allclose(disc_unitary(g.apply(z), g.apply(w), t), phase * disc_unitary(z, w, t),
                        rtol=1e-9, atol=1e-13)
    assert disc_equivariance_defect(disc_enumeration, z, w, t) < 1e-10


def test_disc_kernel_refuses_boundary_points():
    with pytest.raises(DomainError):
        disc_unitary(1.0 + 0j, 0j, 2)


def test_lift_phase_law():
    x, y = LiftedPoint(0.1 + 0.2j, 1.0), LiftedPoint(-0.3j, 6.5)
    N = 3
    base = lift_kernel(x, y, N, lambda z, w: fock_unitary(z, w, N))
    turned = lift_kernel(x.rotated(0.7), y, N, lambda z, w: fock_unitary(z, w, N))
    assert_allclose(turned, np.exp(0.7j * N) * base, atol=1e-14)
    assert 0 <= y.theta < 2 * np.pi


def test_agmon_bound_only_off_diagonal(flat_space):
    assert_allclose(agmon_bound(flat_space, 4, 0j, 2.0 + 0j), np.exp(-4.0))
    with pytest.raises(PreconditionError):
        agmon_bound(flat_space, 4, 0j, 0.5 + 0j)


def test_beta_margin_sign():
    assert flat_beta_margin(1.0, 1) < 0
    assert flat_beta_margin(5.0, 1) > 0
    assert flat_beta_margin(1e3, 3) > 0
