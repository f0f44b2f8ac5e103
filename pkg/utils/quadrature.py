"""Quadrature rules over the fundamental domains and over plane discs."""
import numpy as np
from numpy.polynomial.legendre import leggauss

from objects.sections import QuadratureSpec
from utils.logger import log

__all__ = [
    "unit_gauss_legendre",
    "parallelogram_quadrature",
    "octagon_quadrature",
    "plane_disc_quadrature",
    "domain_quadrature",
]


def unit_gauss_legendre(n):
    """Gauss-Legendre nodes and weights on [0, 1]"""
    x, w = leggauss(int(n))
    return 0.5 * (x + 1.0), 0.5 * w


def parallelogram_quadrature(domain, n=64):
    """Tensor Gauss-Legendre on the period parallelogram, weights sum to Im tau"""
    s, ws = unit_gauss_legendre(n)
    ss, tt = np.meshgrid(s, s, indexing="ij")
    nodes = ss + tt * domain.tau
    weights = domain.area * np.outer(ws, ws)
    return QuadratureSpec(
        nodes, weights, error=0.0,
        description={"kind": "gauss-legendre-parallelogram", "n": int(n),
                     "tau": [domain.tau.real, domain.tau.imag]},
    )


def octagon_quadrature(domain, n=16):
    """Fan of eight hyperbolic triangles (0, V_{k-1}, V_k) with collapsed tensor Gauss rules

    Triangle k is swept by z = s c_k(u), c_k the exact parametrization of
    side k, so dA = s |Im(conj(c) c')| ds du; the weights carry dV / dA.
    """
    s, ws = unit_gauss_legendre(n)
    u, wu = unit_gauss_legendre(n)
    nodes, weights = [], []
    for k in range(8):
        c, dc = domain.side_arc(k, u)
        jac = np.abs(np.imag(np.conj(c) * dc))
        z = s[:, None] * c[None, :]
        area = ws[:, None] * s[:, None] * (wu * jac)[None, :]
        nodes.append(z.ravel())
        weights.append((area * 4.0 / (1.0 - np.abs(z) ** 2) ** 2).ravel())
    nodes = np.concatenate(nodes)
    weights = np.concatenate(weights)
    error = abs(weights.sum() - domain.area)
    log.debug("octagon quadrature n=%d: volume error %.2e", n, error)
    return QuadratureSpec(
        nodes, weights, error=error,
        description={"kind": "octagon-fan", "n": int(n)},
    )


def plane_disc_quadrature(center, radius, n_radial=96, n_angular=128):
    """Polar rule on a Euclidean disc: Gauss-Legendre in r, trapezoid in angle"""
    r, wr = unit_gauss_legendre(n_radial)
    r = radius * r
    wr = radius * wr
    angle = 2 * np.pi * np.arange(n_angular) / n_angular
    nodes = complex(center) + r[:, None] * np.exp(1j * angle)[None, :]
    weights = (wr * r)[:, None] * np.full(n_angular, 2 * np.pi / n_angular)[None, :]
    return QuadratureSpec(
        nodes, weights, error=0.0,
        description={"kind": "plane-disc", "radius": float(radius),
                     "n_radial": int(n_radial), "n_angular": int(n_angular)},
    )


def domain_quadrature(space, n):
    """Default rule for the fundamental domain of a model space"""
    if space.kind == "flat":
        return parallelogram_quadrature(space.domain, n)
    return octagon_quadrature(space.domain, n)
