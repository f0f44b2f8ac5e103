"""Level-N theta functions with characteristics on the torus C / (Z + tau Z).

theta_j(z) = sum_n exp(i pi N tau k^2 + 2 pi i N k z), k = n + j/N.

The series is summed in the unitary frame, where the n-th term has
modulus exp(-pi N (k sqrt(v) + y / sqrt(v))^2), v = Im tau, y = Im z.
Terms are kept while that Gaussian exceeds the tail target, so the
discarded part is below THETA_TAIL in the unitary frame.
"""
import numpy as np

from utils.errors import DomainError, PreconditionError
from utils.summation import compensated_sum

__all__ = ["THETA_TAIL", "theta_terms", "theta_unitary", "theta_section", "theta_form"]

THETA_TAIL = 1e-14


def _check(j, N, tau):
    if N < 1 or not 0 <= j < N:
        raise PreconditionError(f"characteristic index j={j} outside 0..{N - 1}")
    tau = complex(tau)
    if tau.imag <= 0:
        raise DomainError(f"lattice modulus needs Im tau > 0, got {tau}")
    return tau


def _half_width(N, v):
    # 2 e^{-pi N v K^2} / (1 - e^{-2 pi N v K}) < THETA_TAIL with margin
    return np.sqrt(np.log(4.0 / THETA_TAIL) / (np.pi * N * v)) + 1.0


def theta_terms(j, z, N, tau=1j):
    """Unitary-frame terms of theta_j, shape (terms,) + shape(z)"""
    tau = _check(j, N, tau)
    z = np.asarray(z, dtype=complex)
    v = tau.imag
    x, y = z.real, z.imag
    # Terms peak at k = -y / v
    peak = -y / v
    width = _half_width(N, v)
    shift = j / N
    lo = int(np.floor(np.min(peak, initial=0.0) - width - shift)) - 1
    hi = int(np.ceil(np.max(peak, initial=0.0) + width - shift)) + 1
    k = (np.arange(lo, hi + 1) + shift).reshape((-1,) + (1,) * z.ndim)
    exponent = (
        1j * np.pi * N * tau * k**2
        + 2j * np.pi * N * k * z[None, ...]
        - N * np.pi * y[None, ...] ** 2 / v
        + 1j * N * np.pi * (x * y)[None, ...] / v
    )
    return np.exp(exponent)


def theta_unitary(j, z, N, tau=1j):
    """theta_j(z) e^{N pi (z^2 - |z|^2) / 2v}, the theta section in the unitary frame"""
    return compensated_sum(theta_terms(j, z, N, tau), axis=0)


def theta_section(j, z, N, tau=1j):
    """The classical value theta_j(z)"""
    tau = _check(j, N, tau)
    z = np.asarray(z, dtype=complex)
    v = tau.imag
    return theta_unitary(j, z, N, tau) * np.exp(N * np.pi * (z.imag**2 - 1j * z.real * z.imag) / v)


def theta_form(j, z, N, tau=1j):
    """f_j = exp(N pi z^2 / 2v) theta_j, which transforms by J(lambda, z) under the lattice"""
    tau = _check(j, N, tau)
    z = np.asarray(z, dtype=complex)
    return theta_unitary(j, z, N, tau) * np.exp(N * np.pi * np.abs(z) ** 2 / (2 * tau.imag))
