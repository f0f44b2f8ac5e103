"""Downstairs pipeline: Gram matrices, orthonormal bases and the basis-built kernel."""
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed
from scipy import linalg

from objects.kernels import KernelValue
from objects.sections import MonomialSection, SectionBasis
from utils.errors import PreconditionError
from utils.logger import log
from utils.poincare import poincare_map
from utils.summation import block_sum

__all__ = [
    "GramResult",
    "gram_matrix",
    "orthonormalize",
    "build_basis",
    "quotient_kernel",
    "basis_kernel_matrix",
    "poincare_basis_section",
]

GRAM_FLAG_RATIO = 1e-6


@dataclass
class GramResult:
    matrix: np.ndarray
    error: float
    flagged: bool


def _gram_block(family, nodes, weights):
    values = family.evaluate(nodes)
    return (values * weights[None, :]) @ values.conj().T


def _assemble(family, quad, threads, block):
    n = family.size
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    spans = [(s, min(s + block, quad.size)) for s in range(0, quad.size, block)]
    if threads == 1:
        partials = [_gram_block(family, quad.nodes[a:b], quad.weights[a:b]) for a, b in spans]
    else:
        partials = Parallel(n_jobs=threads, prefer="threads")(
            delayed(_gram_block)(family, quad.nodes[a:b], quad.weights[a:b]) for a, b in spans
        )
    G = block_sum(partials)
    # Hermitian by construction
    return 0.5 * (G + G.conj().T)


def gram_matrix(family, quad, refined=None, threads=1, block=1024, flag_ratio=GRAM_FLAG_RATIO):
    """G_ab = sum_nodes w f_a conj(f_b) e^{-N phi}, with a node-doubling error estimate

    `refined` is a finer rule over the same domain; when given, the error
    is the operator-norm change between the two Gram matrices and the
    result is flagged above 1e-6 ||G||.
    """
    G = _assemble(family, quad, threads, block)
    error = float(quad.error)
    if refined is not None and family.size:
        error = float(np.linalg.norm(G - _assemble(family, refined, threads, block), 2))
    scale = float(np.linalg.norm(G, 2)) if family.size else 0.0
    flagged = bool(family.size and error > flag_ratio * scale)
    if flagged:
        log.warning("Gram quadrature error %.2e exceeds %.0e of ||G|| = %.3e",
                    error, flag_ratio, scale)
    return GramResult(G, error, flagged)


def _numerical_rank(G, rtol):
    values = linalg.eigvalsh(G)
    top = max(values.max(initial=0.0), 0.0)
    return int(np.count_nonzero(values > rtol * top)) if top > 0 else 0


def orthonormalize(G, rtol=1e-10, method="auto"):
    """Whitening coefficients C (d_N x d) with C G C* = I, and the numerical rank d_N

    method "eigh" keeps the eigenvectors above rtol * lambda_max;
    "cholesky" factors the Gram of a pivoted full-rank subfamily;
    "auto" uses Cholesky when G has full numerical rank.
    """
    G = np.asarray(G, dtype=complex)
    d = G.shape[0]
    if d == 0:
        return np.zeros((0, 0), dtype=complex), 0
    rank = _numerical_rank(G, rtol)
    if method == "auto":
        method = "cholesky" if rank == d else "eigh"
    if rank == 0:
        return np.zeros((0, d), dtype=complex), 0

    if method == "eigh":
        values, vectors = linalg.eigh(G)
        keep = values > rtol * values.max()
        return (vectors[:, keep] / np.sqrt(values[keep])).conj().T, rank

    if method == "cholesky":
        if rank == d:
            chosen = np.arange(d)
        else:
            _, _, pivots = linalg.qr(G, pivoting=True)
            chosen = np.sort(pivots[:rank])
        sub = G[np.ix_(chosen, chosen)]
        L = linalg.cholesky(sub, lower=True)
        inv = linalg.solve_triangular(L, np.eye(rank), lower=True)
        C = np.zeros((rank, d), dtype=complex)
        C[:, chosen] = inv
        return C, rank

    raise ValueError(f"unknown orthonormalization method {method!r}")


def build_basis(family, quad, rtol=1e-10, method="auto", refined=None, threads=1,
                flag_ratio=GRAM_FLAG_RATIO):
    """Gram matrix, whitening and rank of a generating family, packed as a SectionBasis"""
    gram = gram_matrix(family, quad, refined=refined, threads=threads, flag_ratio=flag_ratio)
    C, rank = orthonormalize(gram.matrix, rtol=rtol, method=method)
    log.info("%s family of %d sections: numerical rank %d", family.kind, family.size, rank)
    return SectionBasis(
        family=family,
        description=family.describe(),
        gram=gram.matrix,
        coefficients=C,
        rank=rank,
        quadrature=dict(quad.description),
        method=method,
        flagged=gram.flagged,
        gram_error=gram.error,
    )


def _reduced_values(basis, z, space, N):
    z = np.asarray(z, dtype=complex)
    if space is None:
        return basis.evaluate(z)
    reduced, phase = space.reduce(z, N)
    return phase[None, ...] * basis.evaluate(reduced)


def quotient_kernel(z, w, basis, space=None, N=None):
    """B_N(z, conj(w)) = sum_j S_j(z) conj(S_j(w)) from an orthonormal basis

    With `space` given, both arguments are first reduced into the
    fundamental domain and the accumulated automorphy phases are applied.
    """
    z, w = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))
    Sz = _reduced_values(basis, z, space, N)
    Sw = _reduced_values(basis, w, space, N)
    unitary = np.sum(Sz * Sw.conj(), axis=0)
    if space is None:
        return KernelValue(unitary, unitary, frame="unitary-basis")
    density = unitary * np.exp(0.5 * (space.log_weight(z, N) + space.log_weight(w, N)))
    return KernelValue(density, unitary, frame=f"{space.kind}-basis")


def basis_kernel_matrix(basis, xs, ys):
    """[B(x_a, y_b)] in the unitary frame"""
    Sx = basis.evaluate(np.asarray(xs, dtype=complex).ravel())
    Sy = basis.evaluate(np.asarray(ys, dtype=complex).ravel())
    return Sx.T @ Sy.conj()


def poincare_basis_section(space, j, z, t, radius=None, enumeration=None, stats=None,
                           threads=1):
    """P(z^j (dz)^t)(z) in the unitary frame, with its truncation certificate"""
    if t < 2:
        raise PreconditionError(f"Poincare series of weight 2t diverge for t={t} < 2")
    return poincare_map(space, MonomialSection(j, t), z, t, radius=radius,
                        enumeration=enumeration, stats=stats, threads=threads)
