"""The two model covers: the flat plane over a torus and the disc over a genus-2 surface."""
from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np

from objects.groups import LatticeGroup, OctagonGroup
from utils.cover_kernels import (
    agmon_bound,
    disc_decay,
    disc_kernel,
    disc_log_weight,
    disc_unitary,
    flat_log_weight,
    fock_decay,
    fock_kernel,
    fock_unitary,
    lift_kernel,
)
from utils.hyperbolic import check_in_disc, disc_distance


class ModelSpace(ABC):
    """A homogeneous cover with its deck group, weight, kernel and fundamental domain"""
    kind = None
    # Factor in ds = metric_scale |dz| / (conformal denominator)
    metric_scale = 1.0
    basepoint = 0j

    def __init__(self, group):
        self.group = group
        self.domain = group.domain

    @property
    def volume(self):
        return self.domain.area

    @abstractmethod
    def distance(self, x, y): ...

    @abstractmethod
    def log_weight(self, z, N):
        """N phi(z), so that |e_L|^{2N} = e^{-N phi(z)}"""

    @abstractmethod
    def volume_density(self, z):
        """dV / dA at z"""

    @abstractmethod
    def cover_unitary(self, z, w, N): ...

    @abstractmethod
    def cover_kernel(self, z, w, N): ...

    @abstractmethod
    def decay(self, w, N):
        """DecayBound of the peak section centred at w"""

    @abstractmethod
    def reduce(self, z, N):
        """(z', phase) with z' in the fundamental domain and u(z) = phase * u(z')

        u is any automorphic section in the unitary frame.
        """

    @abstractmethod
    def sample_points(self, rng, count): ...

    def lift_kernel(self, x, y, N):
        return lift_kernel(x, y, N, lambda z, w: self.cover_unitary(z, w, N))

    def agmon_bound(self, N, x, y, beta=1.0):
        return agmon_bound(self, N, x, y, beta)

    def enumerate(self, radius, basepoint=None, **kwargs):
        basepoint = self.basepoint if basepoint is None else basepoint
        return self.group.enumerate(basepoint, radius, **kwargs)

    @abstractmethod
    def describe(self): ...


class FlatModel(ModelSpace):
    """C over the torus C / (Z + tau Z) with the Fock weight"""
    kind = "flat"

    def __init__(self, tau=1j, semicharacter=True):
        super().__init__(LatticeGroup(tau, semicharacter=semicharacter))
        self.tau = self.group.tau

    def distance(self, x, y):
        return np.abs(np.asarray(x, dtype=complex) - np.asarray(y, dtype=complex))

    def log_weight(self, z, N):
        return flat_log_weight(z, N, self.tau)

    def volume_density(self, z):
        return np.ones(np.shape(z))

    def cover_unitary(self, z, w, N):
        return fock_unitary(z, w, N, self.tau)

    def cover_kernel(self, z, w, N):
        return fock_kernel(z, w, N, self.tau)

    def decay(self, w, N):
        return fock_decay(w, N, self.tau)

    def reduce(self, z, N):
        reduced, (m, n) = self.domain.reduce(z)
        lam = m + n * self.tau
        chi = 1.0
        if self.group.semicharacter:
            chi = np.where((m * n * N) % 2 == 1, -1.0, 1.0)
        phase = chi * np.exp(1j * N * np.pi * np.imag(reduced * np.conj(lam)) / self.tau.imag)
        return reduced, phase

    def sample_points(self, rng, count):
        s = rng.uniform(0.0, 1.0, count)
        t = rng.uniform(0.0, 1.0, count)
        return s + t * self.tau

    def describe(self):
        return {
            "kind": self.kind,
            "tau": [self.tau.real, self.tau.imag],
            "semicharacter": self.group.semicharacter,
        }


class HyperbolicModel(ModelSpace):
    """Unit disc with ds = 2|dz| / (1 - |z|^2) over the genus-2 octagon surface"""
    kind = "hyperbolic"
    metric_scale = 2.0

    def __init__(self, word_cap=40, sample_radius=0.6):
        super().__init__(OctagonGroup(word_cap=word_cap))
        # Hyperbolic radius around the centre used for random sample points
        self.sample_radius = sample_radius

    def distance(self, x, y):
        return disc_distance(check_in_disc(x), check_in_disc(y))

    def log_weight(self, z, N):
        return disc_log_weight(z, N)

    def volume_density(self, z):
        z = check_in_disc(z)
        return 4.0 / (1.0 - np.abs(z) ** 2) ** 2

    def cover_unitary(self, z, w, N):
        return disc_unitary(z, w, N)

    def cover_kernel(self, z, w, N):
        return disc_kernel(z, w, N)

    def decay(self, w, N):
        return disc_decay(w, N)

    def reduce(self, z, N):
        z = check_in_disc(z)
        reduced, (a, b) = self.domain.reduce(z)
        c = np.conj(b) * z + np.conj(a)
        # u(g z) = (c/|c|)^{2N} u(z)
        return reduced, np.conj((c / np.abs(c)) ** (2 * N))

    def sample_points(self, rng, count):
        d = rng.uniform(0.0, self.sample_radius, count)
        angle = rng.uniform(0.0, 2 * np.pi, count)
        return np.tanh(0.5 * d) * np.exp(1j * angle)

    def describe(self):
        return {
            "kind": self.kind,
            "octagon": "regular, vertex angle pi/4",
            "word_cap": self.group.word_cap,
        }
