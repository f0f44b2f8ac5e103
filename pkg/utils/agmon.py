"""Empirical Agmon decay: fit -log |Pi_N(x, y)| against sqrt(N) d(x, y)."""
import numpy as np
from scipy import stats

from utils.cover_kernels import disc_unitary, fock_unitary
from utils.errors import PreconditionError

__all__ = ["MIN_SAMPLES", "agmon_samples", "fit_agmon", "flat_agmon_fit", "disc_agmon_fit"]

MIN_SAMPLES = 8


def agmon_samples(unitary, powers, distances, point_at):
    """(sqrt(N) d, -log norm) over the product of powers and distances

    point_at(d) returns a point at distance d from the origin.
    """
    powers = np.asarray(powers, dtype=float)
    distances = np.asarray(distances, dtype=float)
    if np.any(distances < 1.0):
        raise PreconditionError("Agmon samples need d >= 1")
    NN, dd = np.meshgrid(powers, distances, indexing="ij")
    norms = np.array([
        abs(complex(unitary(0j, point_at(d), int(N))))
        for N, d in zip(NN.ravel(), dd.ravel())
    ])
    return np.sqrt(NN.ravel()) * dd.ravel(), -np.log(norms)


def fit_agmon(x, y, min_samples=MIN_SAMPLES):
    """Least-squares line y = beta x + c; beta is the fitted Agmon constant"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < min_samples:
        raise PreconditionError(f"Agmon fit needs at least {min_samples} samples, got {x.size}")
    if np.ptp(x) == 0:
        raise PreconditionError("Agmon fit needs distinct values of sqrt(N) d")
    fit = stats.linregress(x, y)
    predicted = fit.slope * x + fit.intercept
    return {
        "beta_hat": float(fit.slope),
        "intercept": float(fit.intercept),
        "r_squared": float(fit.rvalue**2),
        "rms_residual": float(np.sqrt(np.mean((y - predicted) ** 2))),
        "samples": int(x.size),
    }


def flat_agmon_fit(powers, distances, tau=1j):
    x, y = agmon_samples(lambda z, w, N: fock_unitary(z, w, N, tau), powers, distances,
                         lambda d: complex(d))
    return fit_agmon(x, y)


def disc_agmon_fit(powers, distances):
    x, y = agmon_samples(disc_unitary, powers, distances, lambda d: complex(np.tanh(0.5 * d)))
    return fit_agmon(x, y)
