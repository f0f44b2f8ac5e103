import numpy as np
import pytest
from numpy.testing import assert_allclose

from objects.sections import PoincareMonomialFamily, SectionBasis, ThetaFamily
from utils.errors import PreconditionError
from utils.quadrature import domain_quadrature
from utils.quotient import (
    basis_kernel_matrix,
    build_basis,
    gram_matrix,
    orthonormalize,
    poincare_basis_section,
    quotient_kernel,
)


def random_gram(rng, d, rank=None):
    rank = d if rank is None else rank
    A = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    return A @ A.conj().T


@pytest.mark.parametrize("method", ["eigh", "cholesky", "auto"])
def test_whitening_gives_the_identity(method, rng):
    G = random_gram(rng, 5)
    C, rank = orthonormalize(G, method=method)
    assert rank == 5
    assert_allclose(C @ G @ C.conj().T, np.eye(5), atol=1e-10)


@pytest.mark.parametrize("method", ["eigh", "cholesky"])
def test_rank_deficient_gram(method, rng):
    G = random_gram(rng, 6, rank=4)
    C, rank = orthonormalize(G, method=method)
    assert rank == 4
    assert C.shape == (4, 6)
    assert_allclose(C @ G @ C.conj().T, np.eye(4), atol=1e-8)


def test_unknown_method_is_refused(rng):
    with pytest.raises(ValueError):
        orthonormalize(random_gram(rng, 3), method="qr")


@pytest.mark.parametrize("N", [1, 2, 3])
def test_theta_bases_have_rank_N(N, theta_bases):
    basis = theta_bases[N]
    assert basis.d_N == N
    assert not basis.flagged


def test_repeated_characteristics_do_not_raise_the_rank(flat_space):
    quad = domain_quadrature(flat_space, 24)
    basis = build_basis(ThetaFamily(2, 1j, [0, 1, 1]), quad)
    assert basis.rank == 2


def test_basis_is_orthonormal_on_its_rule(flat_space, theta_bases):
    quad = domain_quadrature(flat_space, 32)
    S = theta_bases[3].evaluate(quad.nodes)
    G = (S * quad.weights) @ S.conj().T
    assert_allclose(G, np.eye(3), atol=1e-10)


def test_gram_refinement_estimates_the_error(flat_space):
    family = ThetaFamily(2, 1j)
    coarse = gram_matrix(family, domain_quadrature(flat_space, 4),
                         refined=domain_quadrature(flat_space, 32))
    fine = gram_matrix(family, domain_quadrature(flat_space, 32),
                       refined=domain_quadrature(flat_space, 48))
    assert fine.error < 1e-11
    assert coarse.error > fine.error


def test_theta_gram_is_diagonal(flat_space):
    """Distinct characteristics are orthogonal, each of norm sqrt(v / 2N)"""
    N = 3
    gram = gram_matrix(ThetaFamily(N, 1j), domain_quadrature(flat_space, 32))
    assert_allclose(gram.matrix, np.eye(N) * np.sqrt(1 / (2 * N)), atol=1e-12)


def test_quotient_kernel_is_hermitian_and_periodic(flat_space, theta_bases):
    basis = theta_bases[2]
    x, y = 0.2 + 0.7j, 0.6 + 0.3j
    k = quotient_kernel(x, y, basis, flat_space, 2)
    assert_allclose(k.unitary, np.conj(quotient_kernel(y, x, basis, flat_space, 2).unitary),
                    atol=1e-13)
    shifted = quotient_kernel(x + 3, y - 2j, basis, flat_space, 2)
    assert_allclose(abs(shifted.unitary), abs(k.unitary), atol=1e-12)


def test_kernel_matrix_shape(theta_bases):
    K = basis_kernel_matrix(theta_bases[1], np.array([0.1j, 0.5]), np.array([0.3 + 0.3j]))
    assert K.shape == (2, 1)


def test_basis_without_family_cannot_evaluate():
    basis = SectionBasis(None, {}, np.eye(1), np.eye(1), 1, {})
    with pytest.raises(PreconditionError):
        basis.evaluate(0j)


def test_poincare_series_need_weight_two(disc_space, disc_enumeration):
    with pytest.raises(PreconditionError):
        poincare_basis_section(disc_space, 0, 0j, 1, enumeration=disc_enumeration)
    with pytest.raises(PreconditionError):
        PoincareMonomialFamily(disc_space, 1, disc_enumeration)


def test_monomial_family_matches_the_poincare_map(disc_space, disc_enumeration):
    stats = disc_space.group.stats(disc_enumeration)
    family = PoincareMonomialFamily(disc_space, 2, disc_enumeration, exponents=[0, 3])
    z = np.array([0.1 + 0.2j, -0.3j])
    values = family.evaluate(z)
    for row, j in enumerate(family.exponents):
        direct, cert = poincare_basis_section(disc_space, j, z, 2, enumeration=disc_enumeration,
                                              stats=stats)
        assert_allclose(values[row], direct, rtol=1e-12, atol=1e-14)
    assert cert.method == "agmon-geometric"
