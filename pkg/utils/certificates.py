"""Tail bounds for truncated Gamma-sums.

Flat model: the discarded lattice terms are dominated by a Gaussian and
compared cell by cell with an integral over the plane outside R - rho.
Disc model: the group is counted in shells of width `shell` using the
growth constants of GroupStats, and each shell is bounded by the
exponential decay of the summand.
"""
import numpy as np
from scipy.optimize import brentq
from scipy.special import erfc

from objects.kernels import DecayBound, TruncationCertificate
from utils.cover_kernels import flat_beta_margin
from utils.errors import PreconditionError
from utils.logger import log

__all__ = [
    "gaussian_lattice_tail",
    "geometric_shell_tail",
    "certify_tail",
    "minimal_radius",
]

THRESHOLD_REASON = "N below operational threshold"


def gaussian_lattice_tail(radius, amplitude, alpha, cell_radius, area, delta=0.0):
    """Bound on sum_{|lambda| > R} amplitude exp(-alpha |lambda + z - c|^2), delta = |z - c|"""
    r_lo = max(radius - cell_radius, 0.0)
    r_mid = cell_radius + delta
    if r_lo < r_mid:
        # Profile capped at the amplitude inside r_mid
        plateau = amplitude * (r_mid**2 - r_lo**2) / 2
        s_start = 0.0
    else:
        plateau = 0.0
        s_start = r_lo - r_mid
    root = np.sqrt(alpha)
    gaussian = amplitude * (
        np.exp(-alpha * s_start**2) / (2 * alpha)
        + r_mid * np.sqrt(np.pi) / (2 * root) * erfc(root * s_start)
    )
    return float(2 * np.pi / area * (plateau + gaussian))


def geometric_shell_tail(radius, amplitude, rate, growth_a, growth_b, delta=0.0, shell=0.5):
    """sum_k a e^{b (R + (k+1) shell)} * A e^{-kappa (R + k shell - delta)}, in closed form"""
    gap = rate - growth_b
    if gap <= 0:
        return np.inf
    head = amplitude * growth_a * np.exp(growth_b * shell + rate * delta - gap * radius)
    return float(head / -np.expm1(-gap * shell))


def certify_tail(space, N, radius, stats=None, beta=None, decay=None, delta=0.0,
                 tolerance=None, shell=0.5, mode="envelope"):
    """TruncationCertificate for a radius-R truncation of a Gamma-sum

    decay defaults to the peak-section decay of `space`. On the disc,
    mode "fitted" replaces it by the Agmon majorant e^{-beta sqrt(N) d},
    which is heuristic since beta comes from a fit.
    """
    if radius < 0:
        raise PreconditionError("truncation radius must be nonnegative")
    if decay is None:
        decay = space.decay(space.basepoint, N)

    if space.kind == "flat":
        tail = gaussian_lattice_tail(
            radius, decay.amplitude, decay.rate,
            space.domain.cell_radius, space.domain.area, delta,
        )
        cert = TruncationCertificate(radius, 0, tail, "gaussian-flat", tolerance=tolerance)
        if beta is not None:
            margin = flat_beta_margin(beta, N, space.tau)
            cert.details["beta_margin"] = margin
            if margin > 0:
                cert.valid = False
                cert.reason = (
                    f"{THRESHOLD_REASON}: beta={beta} exceeds the Gaussian decay at N={N}"
                )
        return cert

    if stats is None:
        raise PreconditionError("disc tail bounds need GroupStats growth constants")
    heuristic = decay.heuristic
    if mode == "fitted":
        if beta is None:
            raise PreconditionError("fitted certificates need a beta")
        decay = DecayBound("exponential", 1.0, beta * np.sqrt(N), decay.center, heuristic=True)
        heuristic = True
    tail = geometric_shell_tail(
        radius, decay.amplitude, decay.rate, stats.growth_a, stats.growth_b, delta, shell,
    )
    cert = TruncationCertificate(
        radius, 0, tail, "agmon-geometric", tolerance=tolerance, heuristic=heuristic,
        details={"rate": decay.rate, "growth_b": stats.growth_b, "mode": mode},
    )
    if not np.isfinite(tail):
        cert.valid = False
        cert.reason = (
            f"{THRESHOLD_REASON}: decay rate {decay.rate:.3f} does not beat "
            f"growth rate {stats.growth_b:.3f}"
        )
    return cert


def minimal_radius(space, N, tolerance, max_radius=64.0, **kwargs):
    """Smallest radius whose certificate meets `tolerance`, or None if beyond max_radius"""

    def excess(r):
        return np.log(certify_tail(space, N, r, **kwargs).tail_bound) - np.log(tolerance)

    start = certify_tail(space, N, 0.0, **kwargs)
    if not start.valid:
        return None
    if start.tail_bound <= tolerance:
        return 0.0
    if excess(max_radius) > 0:
        log.warning("tail %.1e not reached below radius %.1f", tolerance, max_radius)
        return None
    return float(brentq(excess, 0.0, max_radius, xtol=1e-6))
