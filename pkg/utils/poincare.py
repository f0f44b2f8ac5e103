"""Truncated Gamma-sums: the summed kernel and the Poincare map on sections.

All sums run in the unitary frame. The term for gamma is
conj(psi(gamma, x)) * u(gamma x), where psi = J / |J| is the automorphy
phase; its modulus is the pointwise norm of the summand, so no term can
overflow however large the lattice vector or the power N.
"""
import numpy as np
from joblib import Parallel, delayed

from objects.kernels import KernelValue
from utils.certificates import certify_tail
from utils.errors import PreconditionError
from utils.logger import log
from utils.summation import compensated_sum

__all__ = [
    "CHUNK_SIZE",
    "resolve_enumeration",
    "resolve_stats",
    "pair_delta",
    "gamma_sum_terms",
    "gamma_sum_unitary",
    "gamma_sum_kernel",
    "gamma_sum_matrix",
    "poincare_map",
]

# Elements per work unit; fixed so that results never depend on the worker count
CHUNK_SIZE = 2048


def resolve_enumeration(space, radius=None, enumeration=None):
    """Enumeration of the ball of the requested radius, reusing a larger one when given"""
    if enumeration is None:
        if radius is None:
            raise PreconditionError("need a truncation radius or an enumeration")
        return space.enumerate(radius)
    if radius is None or radius >= enumeration.radius:
        return enumeration
    return enumeration.restrict(radius)


def pair_delta(space, x, center):
    """Slack between element displacement and the distance d(gamma x, center)"""
    if space.kind == "flat":
        return float(np.max(space.distance(x, center), initial=0.0))
    x0 = space.basepoint
    return float(np.max(space.distance(x0, x), initial=0.0)
                 + np.max(space.distance(x0, center), initial=0.0))


def _section_terms(enumeration, section_unitary, z, N):
    images = enumeration.apply(z)
    phase = enumeration.unitary_phase(z, N)
    return np.conj(phase) * section_unitary(images)


def _collect_terms(enumeration, section_unitary, z, N, threads=1, chunk_size=CHUNK_SIZE):
    chunks = list(enumeration.chunks(chunk_size))
    if not chunks:
        return np.zeros((0,) + np.shape(z), dtype=complex)
    if threads == 1 or len(chunks) == 1:
        parts = [_section_terms(c, section_unitary, z, N) for c in chunks]
    else:
        parts = Parallel(n_jobs=threads, prefer="threads")(
            delayed(_section_terms)(c, section_unitary, z, N) for c in chunks
        )
    return np.concatenate(parts, axis=0)


def gamma_sum_terms(space, enumeration, x, y, N, threads=1):
    """Unitary-frame summands of sum_gamma J(gamma, x)^{-1} K(gamma x, y), one row per element"""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))
    return _collect_terms(
        enumeration, lambda images: space.cover_unitary(images, y[None, ...], N), x, N, threads
    )


def gamma_sum_unitary(space, enumeration, x, y, N, threads=1, order="descending"):
    terms = gamma_sum_terms(space, enumeration, x, y, N, threads)
    return compensated_sum(terms, axis=0, order=order)


def resolve_stats(space, enumeration, stats=None):
    """Growth constants for disc certificates, fitted from the enumeration when not given"""
    if stats is None and space.kind != "flat":
        return space.group.stats(enumeration)
    return stats


def _check_degree(space, N):
    if N < 1 or (space.kind == "hyperbolic" and N < 2):
        raise PreconditionError(f"Gamma-sum does not converge for N={N} on the {space.kind} model")


def gamma_sum_kernel(space, x, y, N, radius=None, enumeration=None, stats=None, beta=None,
                     tolerance=None, mode="envelope", threads=1):
    """Candidate quotient kernel sum_gamma Pi(gamma x, y), with its truncation certificate

    Returns (KernelValue, TruncationCertificate). A certificate above
    `tolerance` is flagged on the certificate rather than raised.
    """
    _check_degree(space, N)
    enumeration = resolve_enumeration(space, radius, enumeration)
    stats = resolve_stats(space, enumeration, stats)
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    unitary = gamma_sum_unitary(space, enumeration, x, y, N, threads)
    density = unitary * np.exp(0.5 * (space.log_weight(x, N) + space.log_weight(y, N)))
    cert = certify_tail(
        space, N, enumeration.radius, stats=stats, beta=beta,
        decay=space.decay(space.basepoint, N), delta=pair_delta(space, x, y),
        tolerance=tolerance, mode=mode,
    ).with_elements(len(enumeration))
    if not cert.tolerance_met:
        log.warning(
            "tolerance not met: tail bound %.2e at R=%.2f (%s)",
            cert.tail_bound, cert.radius, cert.reason or "raise the radius",
        )
    return KernelValue(density, unitary, frame=f"{space.kind}-quotient"), cert


def gamma_sum_matrix(space, enumeration, xs, ys, N, threads=1, block=16):
    """Matrix [Pi^Gamma(x_a, y_b)] in the unitary frame, assembled in row blocks"""
    xs = np.asarray(xs, dtype=complex).ravel()
    ys = np.asarray(ys, dtype=complex).ravel()
    rows = []
    for start in range(0, len(xs), block):
        xb = xs[start:start + block, None]
        rows.append(gamma_sum_unitary(space, enumeration, xb, ys[None, :], N, threads))
    if not rows:
        return np.zeros((0, len(ys)), dtype=complex)
    return np.concatenate(rows, axis=0)


def poincare_map(space, section, z, N, radius=None, enumeration=None, stats=None,
                 tolerance=None, threads=1):
    """(P f)(z) = sum_gamma J(gamma, z)^{-1} f(gamma z) for a cover section f

    section must carry a DecayBound; the sum is returned in the unitary
    frame together with its TruncationCertificate.
    """
    if getattr(section, "decay", None) is None:
        raise PreconditionError("Poincare map needs a section with a decay certificate")
    enumeration = resolve_enumeration(space, radius, enumeration)
    stats = resolve_stats(space, enumeration, stats)
    z = np.asarray(z, dtype=complex)
    terms = _collect_terms(enumeration, section.unitary, z, N, threads)
    values = compensated_sum(terms, axis=0)
    decay = section.decay
    cert = certify_tail(
        space, N, enumeration.radius, stats=stats, decay=decay,
        delta=pair_delta(space, z, decay.center), tolerance=tolerance,
    ).with_elements(len(enumeration))
    return values, cert
