import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from objects.domains import ParallelogramDomain
from objects.sections import QuadratureSpec
from utils.quadrature import (
    octagon_quadrature,
    parallelogram_quadrature,
    plane_disc_quadrature,
    unit_gauss_legendre,
)


def test_gauss_legendre_on_the_unit_interval():
    x, w = unit_gauss_legendre(6)
    assert_allclose(np.sum(w * x**5), 1 / 6, rtol=1e-14)
    assert np.all((x > 0) & (x < 1))


def test_parallelogram_volume_and_moment():
    domain = ParallelogramDomain(0.3 + 1.2j)
    quad = parallelogram_quadrature(domain, 12)
    assert_allclose(quad.volume, 1.2, rtol=1e-14)
    # Centroid of the parallelogram
    assert_allclose(quad.integrate(quad.nodes) / quad.volume, 0.5 * (1 + domain.tau), rtol=1e-13)


def test_octagon_volume_is_four_pi(disc_space):
    quad = octagon_quadrature(disc_space.domain, 16)
    assert_allclose(quad.volume, 4 * np.pi, rtol=1e-8)
    assert np.all(disc_space.domain.contains(quad.nodes, tol=1e-9))


def test_octagon_rule_against_adaptive_quadrature(disc_space):
    """Integral of (1 - |z|^2)^4 dV over the octagon, with dblquad on one triangle as oracle"""
    domain = disc_space.domain
    quad = octagon_quadrature(domain, 16)
    approx = quad.integrate((1 - np.abs(quad.nodes) ** 2) ** 4)

    def integrand(s, u):
        c, dc = domain.side_arc(0, u)
        z = s * c
        jac = s * abs(np.imag(np.conj(c) * dc))
        return float((1 - abs(z) ** 2) ** 2 * 4 * jac)

    one, _ = integrate.dblquad(integrand, 0, 1, 0, 1, epsabs=1e-12, epsrel=1e-12)
    assert_allclose(approx.real, 8 * one, rtol=1e-8)


def test_plane_disc_area():
    quad = plane_disc_quadrature(1 + 1j, 2.0, 16, 32)
    assert_allclose(quad.volume, 4 * np.pi, rtol=1e-13)


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(np.zeros(3), np.ones(2))
    with pytest.raises(ValueError):
        QuadratureSpec(np.zeros(2), np.array([1.0, 0.0]))
