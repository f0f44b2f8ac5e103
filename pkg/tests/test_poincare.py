import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from objects.sections import CallableSection, MonomialSection, PeakSection
from utils.certificates import certify_tail
from utils.errors import PreconditionError
from utils.poincare import (
    gamma_sum_kernel,
    gamma_sum_matrix,
    gamma_sum_unitary,
    pair_delta,
    poincare_map,
    resolve_enumeration,
)
from utils.quotient import quotient_kernel


def test_summed_kernel_at_the_origin_against_theta_constants(flat_space, flat_enumeration):
    """sum_{m,n} (-1)^{mn} e^{-pi (m^2 + n^2) / 2} for N = 1, tau = i"""
    q = mpmath.exp(-mpmath.pi / 2)
    expected = float(mpmath.jtheta(3, 0, q**4) * mpmath.jtheta(3, 0, q)
                     + mpmath.jtheta(2, 0, q**4) * mpmath.jtheta(4, 0, q))
    value = gamma_sum_unitary(flat_space, flat_enumeration, 0j, 0j, 1)
    assert_allclose(value, expected, rtol=1e-13)
    assert expected == pytest.approx(1.66927, abs=1e-4)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_summed_kernel_equals_the_theta_kernel(N, flat_space, flat_enumeration, theta_bases, rng):
    xs = flat_space.sample_points(rng, 4)
    ys = flat_space.sample_points(rng, 4) + 2.0 - 1j
    summed, cert = gamma_sum_kernel(flat_space, xs, ys, N, enumeration=flat_enumeration)
    direct = quotient_kernel(xs, ys, theta_bases[N], flat_space, N)
    assert_allclose(summed.unitary, direct.unitary, atol=1e-9)
    assert cert.valid
    assert cert.elements_used == len(flat_enumeration)


def test_doubling_stays_under_the_tail_bound(flat_space, flat_enumeration, rng):
    inner = flat_enumeration.restrict(3.0)
    for x, y in zip(flat_space.sample_points(rng, 10), flat_space.sample_points(rng, 10)):
        near = gamma_sum_unitary(flat_space, inner, x, y, 2)
        far = gamma_sum_unitary(flat_space, flat_enumeration, x, y, 2)
        bound = certify_tail(flat_space, 2, 3.0, delta=pair_delta(flat_space, x, y)).tail_bound
        assert abs(far - near) <= bound


def test_results_do_not_depend_on_the_thread_count(flat_space):
    enumeration = flat_space.enumerate(30.0)
    assert len(enumeration) > 2048
    x = np.array([0.1 + 0.2j, 0.7 + 0.3j])
    one = gamma_sum_unitary(flat_space, enumeration, x, 0.5j, 2, threads=1)
    many = gamma_sum_unitary(flat_space, enumeration, x, 0.5j, 2, threads=3)
    assert_array_equal(one, many)


def test_summed_matrix_matches_pointwise_sums(flat_space, flat_enumeration, rng):
    xs = flat_space.sample_points(rng, 5)
    ys = flat_space.sample_points(rng, 3)
    M = gamma_sum_matrix(flat_space, flat_enumeration, xs, ys, 2, block=2)
    assert M.shape == (5, 3)
    assert_allclose(M[3, 1], gamma_sum_unitary(flat_space, flat_enumeration, xs[3], ys[1], 2),
                    rtol=1e-13)


def test_identity_only_sum_is_the_cover_kernel(flat_space, flat_enumeration):
    only = resolve_enumeration(flat_space, 0.5, flat_enumeration)
    assert len(only) == 1
    x, y = 0.3 + 0.1j, 0.6 + 0.4j
    assert_allclose(gamma_sum_unitary(flat_space, only, x, y, 3),
                    flat_space.cover_unitary(x, y, 3))


def test_poincare_map_of_a_peak_section(flat_space, flat_enumeration, theta_bases):
    """P Phi^w = Pi^Gamma(., w), so it matches the quotient kernel column"""
    w = 0.4 + 0.6j
    z = np.array([0.1 + 0.1j, 0.8 + 0.5j])
    values, cert = poincare_map(flat_space, PeakSection(flat_space, w, 2), z, 2,
                                enumeration=flat_enumeration)
    direct = quotient_kernel(z, np.full(2, w), theta_bases[2], flat_space, 2)
    assert_allclose(values, direct.unitary, atol=1e-9)
    assert cert.method == "gaussian-flat"


def test_sections_without_decay_are_refused(flat_space, flat_enumeration):
    section = CallableSection(lambda z: np.ones_like(z))
    with pytest.raises(PreconditionError):
        poincare_map(flat_space, section, 0j, 1, enumeration=flat_enumeration)


def test_disc_sums_need_weight_two(disc_space, disc_enumeration):
    with pytest.raises(PreconditionError):
        gamma_sum_kernel(disc_space, 0j, 0.1j, 1, enumeration=disc_enumeration)
    with pytest.raises(PreconditionError):
        resolve_enumeration(disc_space)


def test_disc_sums_fit_growth_constants_when_none_are_given(disc_space, disc_enumeration):
    stats = disc_space.group.stats(disc_enumeration)
    summed, cert = gamma_sum_kernel(disc_space, 0j, 0.1j, 4, enumeration=disc_enumeration)
    given, given_cert = gamma_sum_kernel(disc_space, 0j, 0.1j, 4, enumeration=disc_enumeration,
                                         stats=stats)
    assert_allclose(summed.unitary, given.unitary)
    assert cert.method == "agmon-geometric"
    assert cert.tail_bound == given_cert.tail_bound

    values, cert = poincare_map(disc_space, MonomialSection(1, 3), np.array([0.1j, 0.2]), 3,
                                enumeration=disc_enumeration)
    assert values.shape == (2,)
    assert cert.elements_used == len(disc_enumeration)


@pytest.mark.slow
def test_poincare_series_of_a_monomial_is_automorphic(disc_space):
    """F(g z) g'(z)^t = F(z) for F the density of P((dz)^t)"""
    t = 4
    enumeration = disc_space.enumerate(9.0)
    g = disc_space.group.generators[0]
    # Near the side that g carries onto its opposite, so z and g z sit equally deep
    edge = np.tanh(0.5 * disc_space.group.side_distance)
    z = np.array([-0.9 * edge, -0.8 * edge + 0.1j])
    section = MonomialSection(0, t)

    def density(points):
        values, _ = poincare_map(disc_space, section, points, t, enumeration=enumeration)
        return values / (1.0 - np.abs(points) ** 2) ** t

    moved = density(g.apply(z)) * g.derivative(z) ** t
    assert_allclose(moved, density(z), rtol=1e-6)
