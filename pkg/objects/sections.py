"""Sections on the cover and generating families of sections on the quotient.

Values are always returned in the unitary frame u = f e^{-N phi / 2}, in
which automorphic sections transform by the unit phase psi(gamma, z) and
the hermitian pointwise norm is |u|.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from objects.kernels import DecayBound
from utils.errors import PreconditionError
from utils.hyperbolic import check_in_disc
from utils.summation import compensated_sum
from utils.theta import theta_unitary


@dataclass
class QuadratureSpec:
    """Nodes and positive weights over a fundamental domain, dV included in the weights"""
    nodes: np.ndarray
    weights: np.ndarray
    error: float = 0.0
    description: dict = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=complex).ravel()
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        if self.nodes.shape != self.weights.shape:
            raise ValueError("quadrature nodes and weights differ in length")
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")

    @property
    def size(self):
        return len(self.nodes)

    @property
    def volume(self):
        return float(compensated_sum(self.weights))

    def integrate(self, values, axis=-1):
        """Quadrature of values sampled on the nodes along `axis`"""
        values = np.moveaxis(np.asarray(values), axis, -1)
        return compensated_sum(values * self.weights, order=None)


class CoverSection(ABC):
    """A holomorphic section of the line bundle on the cover"""
    decay: DecayBound | None = None

    @abstractmethod
    def unitary(self, z): ...


class PeakSection(CoverSection):
    """Coherent state Phi^w_N = Pi_N(., w) on the cover"""

    def __init__(self, space, center, N):
        self.space = space
        self.center = complex(center)
        self.N = N
        self.decay = space.decay(self.center, N)

    def unitary(self, z):
        return self.space.cover_unitary(z, self.center, self.N)


class MonomialSection(CoverSection):
    """z^j (dz)^t on the disc, the seed of a relative Poincare series"""

    def __init__(self, exponent, t):
        self.exponent = int(exponent)
        self.t = int(t)
        # |z|^j (1 - |z|^2)^t <= 4^t e^{-t d(0, z)}
        self.decay = DecayBound("exponential", 4.0**self.t, float(self.t), 0j)

    def unitary(self, z):
        z = check_in_disc(z)
        return z**self.exponent * (1.0 - np.abs(z) ** 2) ** self.t


class CallableSection(CoverSection):
    """Wraps a unitary-frame callable; without a DecayBound it cannot be averaged"""

    def __init__(self, func, decay=None):
        self.func = func
        self.decay = decay

    def unitary(self, z):
        return np.asarray(self.func(np.asarray(z, dtype=complex)), dtype=complex)


class SectionFamily(ABC):
    """Finite generating family of quotient sections"""
    kind = None

    @property
    @abstractmethod
    def size(self): ...

    @abstractmethod
    def evaluate(self, z):
        """Unitary values, shape (size,) + shape(z)"""

    @abstractmethod
    def describe(self): ...


class ThetaFamily(SectionFamily):
    """Level-N theta functions with characteristics j/N, j = 0..N-1"""
    kind = "theta"

    def __init__(self, N, tau=1j, characteristics=None):
        self.N = int(N)
        self.tau = complex(tau)
        # Characteristics may repeat, which the rank decision has to absorb
        self.characteristics = (
            list(range(self.N)) if characteristics is None else [int(j) for j in characteristics]
        )

    @property
    def size(self):
        return len(self.characteristics)

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        if not self.characteristics:
            return np.zeros((0,) + z.shape, dtype=complex)
        return np.stack([theta_unitary(j, z, self.N, self.tau) for j in self.characteristics])

    def describe(self):
        return {
            "kind": self.kind,
            "N": self.N,
            "tau": [self.tau.real, self.tau.imag],
            "characteristics": self.characteristics,
        }


class PoincareMonomialFamily(SectionFamily):
    """Relative Poincare series P(z^j (dz)^t) over a fixed enumeration of the octagon group"""
    kind = "poincare-monomial"

    def __init__(self, space, t, enumeration, exponents=None):
        if t < 2:
            raise PreconditionError(f"Poincare series of weight 2t diverge for t={t} < 2")
        self.space = space
        self.t = int(t)
        self.enumeration = enumeration
        top = max(8, 4 * self.t)
        self.exponents = list(range(top + 1)) if exponents is None else [int(j) for j in exponents]

    @property
    def size(self):
        return len(self.exponents)

    @property
    def radius(self):
        return self.enumeration.radius

    def evaluate(self, z, chunk=32):
        z = check_in_disc(z)
        flat = z.ravel()
        out = np.empty((self.size, flat.size), dtype=complex)
        powers = np.asarray(self.exponents)
        for start in range(0, flat.size, chunk):
            zc = flat[start:start + chunk]
            images = self.enumeration.apply(zc)
            phase = np.conj(self.enumeration.unitary_phase(zc, self.t))
            base = phase * (1.0 - np.abs(images) ** 2) ** self.t
            # terms[j, gamma, node]
            terms = images[None, ...] ** powers[:, None, None] * base[None, ...]
            out[:, start:start + chunk] = compensated_sum(terms, axis=1)
        return out.reshape((self.size,) + z.shape)

    def describe(self):
        return {
            "kind": self.kind,
            "t": self.t,
            "exponents": list(self.exponents),
            "radius": float(self.radius),
            "elements": len(self.enumeration),
        }


@dataclass
class SectionBasis:
    """Orthonormalized basis: row i of coefficients gives S_i = sum_a c_ia f_a"""
    family: SectionFamily | None
    description: dict
    gram: np.ndarray
    coefficients: np.ndarray
    rank: int
    quadrature: dict
    method: str = "eigh"
    flagged: bool = False
    gram_error: float = 0.0

    @property
    def d_N(self):
        return self.rank

    def evaluate(self, z):
        """Orthonormal sections at z in the unitary frame, shape (d_N,) + shape(z)"""
        if self.family is None:
            raise PreconditionError("basis was loaded without its generating family")
        values = self.family.evaluate(z)
        flat = values.reshape(values.shape[0], -1)
        return (self.coefficients @ flat).reshape((self.rank,) + np.shape(z))
