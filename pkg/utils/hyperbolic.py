"""Moebius maps of the unit disc in SU(1,1) form.

Elements are stored by their first row (a, b); the full matrix is
[[a, b], [conj(b), conj(a)]] with |a|^2 - |b|^2 = 1. Every function here
is vectorized over numpy arrays of points and/or element entries.
The metric is ds = 2|dz| / (1 - |z|^2), curvature -1.
"""
import numpy as np

from utils.errors import DomainError

__all__ = [
    "check_in_disc",
    "su11_matrix",
    "compose",
    "inverse",
    "mobius",
    "mobius_derivative",
    "disc_distance",
    "translation",
    "rotation",
    "translation_length",
    "psu_normalize",
    "su11_residual",
]


def check_in_disc(z):
    """Raise DomainError unless every point is strictly inside the unit disc"""
    z = np.asarray(z, dtype=complex)
    if np.any(~np.isfinite(z)) or np.any(np.abs(z) >= 1.0):
        raise DomainError("point on or outside the unit disc boundary")
    return z


def su11_matrix(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return np.stack([
        np.stack([a, b], axis=-1),
        np.stack([np.conj(b), np.conj(a)], axis=-1),
    ], axis=-2)


def compose(a1, b1, a2, b2):
    """First row of g1 * g2 (g1 applied after g2)"""
    return a1 * a2 + b1 * np.conj(b2), a1 * b2 + b1 * np.conj(a2)


def inverse(a, b):
    return np.conj(a), -np.asarray(b)


def mobius(a, b, z):
    """Action z -> (a z + b) / (conj(b) z + conj(a))"""
    return (a * z + b) / (np.conj(b) * z + np.conj(a))


def mobius_derivative(a, b, z):
    return 1.0 / (np.conj(b) * z + np.conj(a)) ** 2


def disc_distance(x, y):
    """Hyperbolic distance for ds = 2|dz|/(1-|z|^2): d(0, r) = 2 artanh r"""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    rho = np.abs(x - y) / np.abs(1.0 - np.conj(x) * y)
    return 2.0 * np.arctanh(np.minimum(rho, 1.0))


def translation(length, angle=0.0):
    """Hyperbolic translation of the given length along the diameter at angle"""
    half = 0.5 * length
    return (
        np.cosh(half) + 0j,
        np.exp(1j * angle) * np.sinh(half),
    )


def rotation(angle):
    """Rotation z -> e^{i angle} z"""
    return np.exp(0.5j * angle), 0j


def translation_length(a):
    """Translation length from the trace 2 Re(a); zero for elliptic or identity"""
    half_trace = np.abs(np.real(a))
    return 2.0 * np.arccosh(np.maximum(half_trace, 1.0))


def psu_normalize(a, b):
    """Fix the global sign so that elements of PSU(1,1) have one representative"""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    flip = (np.real(a) < 0) | ((np.real(a) == 0) & (np.imag(a) < 0))
    sign = np.where(flip, -1.0, 1.0)
    return a * sign, b * sign


def su11_residual(a, b):
    """Distance from the SU(1,1) determinant condition |a|^2 - |b|^2 = 1"""
    return np.abs(np.abs(a) ** 2 - np.abs(b) ** 2 - 1.0)
