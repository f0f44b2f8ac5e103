"""Closed-form Bergman kernels of the two model covers.

Flat model: the Fock kernel on C for the weight phi(z) = pi |z|^2 / Im tau,
normalized for Lebesgue measure dA.
Disc model: the kernel 1/2 (1 - z conj(w))^{-2t} for the t-th power of
the canonical bundle, whose hermitian weight is e^{-t phi} = (1 - |z|^2)^{2t}.

Every kernel is available in the unitary frame as well, where values are
bounded by the diagonal and all Gamma-sums are accumulated.
"""
import numpy as np

from objects.kernels import DecayBound, KernelValue
from utils.errors import PreconditionError
from utils.hyperbolic import check_in_disc

__all__ = [
    "flat_log_weight",
    "disc_log_weight",
    "fock_unitary",
    "fock_kernel",
    "disc_unitary",
    "disc_kernel",
    "lift_kernel",
    "agmon_bound",
    "flat_beta_margin",
    "fock_decay",
    "disc_decay",
]


def _check_degree(N):
    if int(N) != N or N < 1:
        raise PreconditionError(f"line bundle power must be a positive integer, got {N}")
    return int(N)


def flat_log_weight(z, N, tau=1j):
    """N phi(z) for phi = pi |z|^2 / Im tau"""
    return N * np.pi * np.abs(z) ** 2 / complex(tau).imag


def disc_log_weight(z, t):
    """t phi(z) with e^{-t phi} = (1 - |z|^2)^{2t}"""
    z = check_in_disc(z)
    return -2 * t * np.log1p(-np.abs(z) ** 2)


def fock_unitary(z, w, N, tau=1j):
    """Fock kernel in the unitary frame; |value| = (N/v) exp(-N pi |z-w|^2 / 2v)"""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    v = complex(tau).imag
    exponent = z * np.conj(w) - 0.5 * np.abs(z) ** 2 - 0.5 * np.abs(w) ** 2
    return (N / v) * np.exp(N * np.pi * exponent / v)


def fock_kernel(z, w, N, tau=1j):
    N = _check_degree(N)
    v = complex(tau).imag
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    density = (N / v) * np.exp(N * np.pi * z * np.conj(w) / v)
    return KernelValue(density, fock_unitary(z, w, N, tau), frame="fock")


def disc_unitary(z, w, t):
    """Disc kernel in the unitary frame; |value| = 1/2 cosh(d(z, w)/2)^{-2t}"""
    z = check_in_disc(z)
    w = check_in_disc(w)
    # Principal log: Re(1 - z conj(w)) > 0 on the disc
    exponent = (
        -2 * t * np.log(1 - z * np.conj(w))
        + t * np.log1p(-np.abs(z) ** 2)
        + t * np.log1p(-np.abs(w) ** 2)
    )
    return 0.5 * np.exp(exponent)


def disc_kernel(z, w, t):
    t = _check_degree(t)
    z = check_in_disc(z)
    w = check_in_disc(w)
    density = 0.5 * np.exp(-2 * t * np.log(1 - z * np.conj(w)))
    return KernelValue(density, disc_unitary(z, w, t), frame="disc")


def lift_kernel(x, y, N, unitary):
    """Scalar kernel on the circle bundle between two LiftedPoints

    unitary(z, w) must return the kernel in the unitary frame; the lift
    only adds the fibre phase e^{iN(theta_x - theta_y)}.
    """
    return np.exp(1j * N * (x.theta - y.theta)) * unitary(x.base, y.base)


def agmon_bound(space, N, x, y, beta=1.0):
    """e^{-beta sqrt(N) d(x, y)}, asserted only for d(x, y) >= 1"""
    d = np.asarray(space.distance(x, y), dtype=float)
    if np.any(d < 1.0):
        raise PreconditionError("Agmon bound is only asserted for d(x, y) >= 1")
    return np.exp(-beta * np.sqrt(N) * d)


def flat_beta_margin(beta, N, tau=1j):
    """max over d >= 1 of log[(N/v) e^{-N pi d^2/2v}] + beta sqrt(N) d

    The Fock norm sits under the Agmon bound for every d >= 1 exactly when
    the margin is <= 0.
    """
    v = complex(tau).imag
    alpha = N * np.pi / (2 * v)
    slope = beta * np.sqrt(N)
    # Concave in d, vertex at slope / (2 alpha)
    d = max(1.0, slope / (2 * alpha))
    return float(np.log(N / v) - alpha * d * d + slope * d)


def fock_decay(w, N, tau=1j):
    v = complex(tau).imag
    return DecayBound("gaussian", N / v, N * np.pi / (2 * v), complex(w))


def disc_decay(w, t):
    # 1/2 cosh(d/2)^{-2t} <= 1/2 4^t e^{-t d}
    return DecayBound("exponential", 0.5 * 4.0**t, float(t), complex(w))
