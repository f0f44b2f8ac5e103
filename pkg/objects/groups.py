"""Deck groups of the two model covers and their elements.

LatticeGroup acts on the plane by translations z -> z + m + n tau.
OctagonGroup acts on the unit disc by the side pairings of the regular
octagon with vertex angle pi/4 (a genus-2 surface group).
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from objects.domains import OctagonDomain, ParallelogramDomain
from utils.errors import PoincareKernelError, ResourceError
from utils.hyperbolic import (
    check_in_disc,
    compose,
    disc_distance,
    inverse,
    mobius,
    mobius_derivative,
    psu_normalize,
    su11_matrix,
    translation,
    translation_length,
)
from utils.logger import log

# Identification tolerance for PSU(1,1) matrices
MATRIX_TOL = 1e-8
ELEMENT_CAP = 10**6
WORD_CAP = 40

# Vertex cycle of the octagon: g0 g3 g6 g1 g4 g7 g2 g5 = 1 with g_{k+4} = g_k^{-1},
# i.e. g0 g3 g2^-1 g1 g0^-1 g3^-1 g2 g1^-1 = 1
OCTAGON_RELATOR = (0, 3, 6, 1, 4, 7, 2, 5)


def _expand(values, z):
    """Broadcast a per-element array against an array of points"""
    return values.reshape(values.shape + (1,) * np.ndim(z))


class GroupElement(ABC):
    """A deck transformation together with its action and automorphy factor"""

    @abstractmethod
    def apply(self, z): ...

    @abstractmethod
    def derivative(self, z): ...

    @abstractmethod
    def automorphy(self, z, N): ...

    @abstractmethod
    def unitary_phase(self, z, N):
        """J(g, z) / |J(g, z)|, the automorphy factor seen in the unitary frame"""

    @abstractmethod
    def compose(self, other): ...

    @abstractmethod
    def inverse(self): ...

    @property
    @abstractmethod
    def is_identity(self): ...

    @property
    @abstractmethod
    def key(self): ...


@dataclass(frozen=True)
class LatticeElement(GroupElement):
    """Translation by the lattice vector m + n tau"""
    m: int
    n: int
    tau: complex
    semicharacter: bool = True

    @property
    def vector(self):
        return self.m + self.n * self.tau

    @property
    def chi(self):
        # Semicharacter (-1)^{mn}; the negative control switches it off
        if not self.semicharacter:
            return 1
        return -1 if (self.m * self.n) % 2 else 1

    def apply(self, z):
        return np.asarray(z, dtype=complex) + self.vector

    def derivative(self, z):
        return np.ones_like(np.asarray(z, dtype=complex))

    def automorphy(self, z, N):
        lam = self.vector
        v = self.tau.imag
        z = np.asarray(z, dtype=complex)
        return self.chi**N * np.exp(N * np.pi * (z * np.conj(lam) + 0.5 * abs(lam) ** 2) / v)

    def unitary_phase(self, z, N):
        lam = self.vector
        z = np.asarray(z, dtype=complex)
        return self.chi**N * np.exp(1j * N * np.pi * np.imag(z * np.conj(lam)) / self.tau.imag)

    def compose(self, other):
        return LatticeElement(self.m + other.m, self.n + other.n, self.tau, self.semicharacter)

    def inverse(self):
        return LatticeElement(-self.m, -self.n, self.tau, self.semicharacter)

    @property
    def is_identity(self):
        return self.m == 0 and self.n == 0

    @property
    def key(self):
        return (self.m, self.n)


@dataclass(frozen=True)
class MobiusElement(GroupElement):
    """Element of SU(1,1) given by its first row (a, b) and the word that produced it"""
    a: complex
    b: complex
    word: tuple = field(default=(), compare=False)

    @property
    def matrix(self):
        return su11_matrix(self.a, self.b)

    @property
    def trace(self):
        return 2 * self.a.real

    def apply(self, z):
        return mobius(self.a, self.b, check_in_disc(z))

    def derivative(self, z):
        return mobius_derivative(self.a, self.b, check_in_disc(z))

    def automorphy(self, z, N):
        # J(g, z) = g'(z)^{-N} = (conj(b) z + conj(a))^{2N}
        c = np.conj(self.b) * np.asarray(z, dtype=complex) + np.conj(self.a)
        return c ** (2 * N)

    def unitary_phase(self, z, N):
        c = np.conj(self.b) * np.asarray(z, dtype=complex) + np.conj(self.a)
        return (c / np.abs(c)) ** (2 * N)

    def compose(self, other):
        a, b = compose(self.a, self.b, other.a, other.b)
        return MobiusElement(complex(a), complex(b), _reduce_word(self.word + other.word))

    def inverse(self):
        a, b = inverse(self.a, self.b)
        word = tuple((k + 4) % 8 for k in reversed(self.word))
        return MobiusElement(complex(a), complex(b), word)

    @property
    def is_identity(self):
        a, b = psu_normalize(self.a, self.b)
        return abs(a - 1) < MATRIX_TOL and abs(b) < MATRIX_TOL

    @property
    def key(self):
        a, b = psu_normalize(self.a, self.b)
        scale = MATRIX_TOL * max(1.0, abs(a))
        return tuple(int(np.rint(x / scale)) for x in (a.real, a.imag, b.real, b.imag))

    def same_element(self, other, tol=MATRIX_TOL):
        a1, b1 = psu_normalize(self.a, self.b)
        a2, b2 = psu_normalize(other.a, other.b)
        scale = max(1.0, abs(a1))
        return abs(a1 - a2) < tol * scale and abs(b1 - b2) < tol * scale


def _reduce_word(word):
    """Cancel adjacent letter/inverse pairs"""
    out = []
    for k in word:
        if out and out[-1] == (k + 4) % 8:
            out.pop()
        else:
            out.append(k)
    return tuple(out)


class EnumeratedGroup(Sequence):
    """Group elements within a displacement radius, sorted by (displacement, key)

    Keeps packed arrays so that Gamma-sums can act with every element at once.
    """

    def __init__(self, group, data, displacements, basepoint, radius):
        self.group = group
        self.data = data
        self.displacements = np.asarray(displacements, dtype=float)
        self.basepoint = complex(basepoint)
        self.radius = float(radius)

    def __len__(self):
        return len(self.displacements)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(len(self)))]
        return self.group.element_at(self.data, index)

    @property
    def count(self):
        return len(self)

    def apply(self, z):
        """Images g.z for every element; shape (count,) + shape(z)"""
        return self.group.apply_packed(self.data, z)

    def unitary_phase(self, z, N):
        return self.group.phase_packed(self.data, z, N)

    def automorphy(self, z, N):
        return self.group.automorphy_packed(self.data, z, N)

    def restrict(self, radius):
        """Sub-enumeration of the elements with displacement <= radius"""
        mask = self.displacements <= radius
        data = {k: v[mask] for k, v in self.data.items()}
        return EnumeratedGroup(self.group, data, self.displacements[mask], self.basepoint, radius)

    def chunks(self, size):
        """Fixed-size pieces in enumeration order"""
        for start in range(0, len(self), size):
            stop = min(start + size, len(self))
            data = {k: v[start:stop] for k, v in self.data.items()}
            yield EnumeratedGroup(self.group, data, self.displacements[start:stop],
                                  self.basepoint, self.radius)


@dataclass
class GroupStats:
    """Systole and exponential growth constants of an enumerated group"""
    systole: float
    growth_a: float
    growth_b: float
    radii: np.ndarray
    counts: np.ndarray

    def count_bound(self, radius):
        return self.growth_a * np.exp(self.growth_b * radius)


@dataclass
class DisplacementResult:
    value: float
    point: complex
    is_identity: bool = False


class DeckGroup(ABC):
    """Common interface of the two deck groups"""
    kind = None

    @abstractmethod
    def distance(self, x, y): ...

    @abstractmethod
    def enumerate(self, basepoint, radius, cap=ELEMENT_CAP): ...

    @abstractmethod
    def displacement_min(self, element): ...

    @abstractmethod
    def translation_length(self, element): ...

    @property
    @abstractmethod
    def identity(self): ...

    def stats(self, enumeration, samples=16):
        """Systole and growth fit a e^{bR} from an enumeration"""
        lengths = self.translation_lengths(enumeration.data)
        nontrivial = lengths[enumeration.displacements > 0]
        if nontrivial.size == 0:
            raise ResourceError("enumeration holds only the identity; raise the radius", 1)
        systole = float(nontrivial.min())
        radii = np.linspace(min(systole, enumeration.radius), enumeration.radius, samples)
        counts = np.array([np.count_nonzero(enumeration.displacements <= r) for r in radii])
        if np.ptp(radii) > 0:
            b, _ = np.polyfit(radii, np.log(counts), 1)
        else:
            b = 0.0
        b = max(float(b), 0.0)
        a = float(np.max(counts / np.exp(b * radii)))
        return GroupStats(systole, a, b, radii, counts)


class LatticeGroup(DeckGroup):
    """The lattice Z + tau Z acting on C by translations"""
    kind = "flat"

    def __init__(self, tau=1j, semicharacter=True):
        self.domain = ParallelogramDomain(tau)
        self.tau = self.domain.tau
        self.semicharacter = semicharacter

    @property
    def identity(self):
        return LatticeElement(0, 0, self.tau, self.semicharacter)

    @property
    def generators(self):
        return [LatticeElement(m, n, self.tau, self.semicharacter)
                for m, n in ((1, 0), (0, 1), (-1, 0), (0, -1))]

    def element(self, m, n):
        return LatticeElement(int(m), int(n), self.tau, self.semicharacter)

    def distance(self, x, y):
        return np.abs(np.asarray(x, dtype=complex) - np.asarray(y, dtype=complex))

    def enumerate(self, basepoint=0j, radius=0.0, cap=ELEMENT_CAP):
        """Every lattice vector of length <= radius, by a bounding-box scan"""
        if radius < 0:
            raise ValueError("enumeration radius must be nonnegative")
        v = self.tau.imag
        estimate = np.pi * (radius + 1) ** 2 / v
        if estimate > 4 * cap:
            raise ResourceError(f"about {int(estimate)} lattice vectors within {radius}", 0)
        n_max = int(np.floor(radius / v)) + 1
        n = np.arange(-n_max, n_max + 1)
        m_max = int(np.ceil(radius + n_max * abs(self.tau.real))) + 1
        m = np.arange(-m_max, m_max + 1)
        mm, nn = np.meshgrid(m, n, indexing="ij")
        mm, nn = mm.ravel(), nn.ravel()
        lengths = np.abs(mm + nn * self.tau)
        keep = lengths <= radius + 1e-12
        mm, nn, lengths = mm[keep], nn[keep], lengths[keep]
        if len(lengths) > cap:
            raise ResourceError(f"{len(lengths)} lattice vectors exceed the cap {cap}",
                                len(lengths))
        order = np.lexsort((nn, mm, lengths))
        data = {"m": mm[order], "n": nn[order]}
        return EnumeratedGroup(self, data, lengths[order], basepoint, radius)

    def element_at(self, data, i):
        return self.element(data["m"][i], data["n"][i])

    def vectors(self, data):
        return data["m"] + data["n"] * self.tau

    def apply_packed(self, data, z):
        z = np.asarray(z, dtype=complex)
        return z[None, ...] + _expand(self.vectors(data), z)

    def _chi(self, data, N):
        if not self.semicharacter:
            return np.ones(len(data["m"]))
        return np.where((data["m"] * data["n"] * N) % 2 == 1, -1.0, 1.0)

    def phase_packed(self, data, z, N):
        z = np.asarray(z, dtype=complex)
        lam = _expand(self.vectors(data), z)
        chi = _expand(self._chi(data, N), z)
        return chi * np.exp(1j * N * np.pi * np.imag(z[None, ...] * np.conj(lam)) / self.tau.imag)

    def automorphy_packed(self, data, z, N):
        z = np.asarray(z, dtype=complex)
        lam = _expand(self.vectors(data), z)
        chi = _expand(self._chi(data, N), z)
        return chi * np.exp(N * np.pi * (z[None, ...] * np.conj(lam) + 0.5 * np.abs(lam) ** 2)
                            / self.tau.imag)

    def translation_length(self, element):
        return abs(element.vector)

    def translation_lengths(self, data):
        return np.abs(self.vectors(data))

    def displacement_min(self, element):
        """Translations have constant displacement |lambda|"""
        return DisplacementResult(abs(element.vector), 0j, element.is_identity)


class OctagonGroup(DeckGroup):
    """Genus-2 surface group of the regular octagon with vertex angle pi/4"""
    kind = "hyperbolic"

    def __init__(self, word_cap=WORD_CAP):
        # cosh(h) = cot(pi/8) = 1 + sqrt(2), h = distance from centre to a side
        self.side_distance = float(np.arccosh(1.0 + np.sqrt(2.0)))
        angles = np.pi * np.arange(8) / 4
        a, b = translation(2 * self.side_distance, angles)
        self.gen_a = np.broadcast_to(a, (8,)).astype(complex)
        self.gen_b = np.asarray(b, dtype=complex)
        self.word_cap = word_cap
        self.domain = OctagonDomain(self.gen_a, self.gen_b, self.side_distance)
        self.relator_residual = self._check_relator()

    def _check_relator(self):
        a, b = 1 + 0j, 0j
        for k in OCTAGON_RELATOR:
            a, b = compose(a, b, self.gen_a[k], self.gen_b[k])
        a, b = psu_normalize(a, b)
        residual = float(max(abs(a - 1), abs(b)))
        if residual > 1e-8:
            raise PoincareKernelError(f"octagon relator fails, residual {residual:.3e}")
        log.debug("octagon relator residual %.2e", residual)
        return residual

    @property
    def identity(self):
        return MobiusElement(1 + 0j, 0j, ())

    @property
    def generators(self):
        return [MobiusElement(complex(self.gen_a[k]), complex(self.gen_b[k]), (k,))
                for k in range(8)]

    def word(self, letters):
        """Element of a word in the generator indices 0..7 (k+4 is the inverse of k)"""
        a, b = 1 + 0j, 0j
        for k in letters:
            a, b = compose(a, b, self.gen_a[k], self.gen_b[k])
        return MobiusElement(complex(a), complex(b), _reduce_word(tuple(letters)))

    def distance(self, x, y):
        return disc_distance(check_in_disc(x), check_in_disc(y))

    def prune_margin(self, basepoint):
        """Radius slack that keeps breadth-first enumeration complete

        Every tile crossed by the geodesic from x0 to g.x0 has its copy of
        x0 within circumradius + d(0, x0) of that geodesic, and neighbouring
        tiles differ by one generator.
        """
        x0 = complex(basepoint)
        gen_disp = float(np.max(disc_distance(x0, mobius(self.gen_a, self.gen_b, x0))))
        tile = float(self.domain.circumradius + disc_distance(0j, x0))
        return max(gen_disp, tile)

    def enumerate(self, basepoint=0j, radius=0.0, cap=ELEMENT_CAP):
        """Breadth-first word enumeration with matrix deduplication and pruning"""
        if radius < 0:
            raise ValueError("enumeration radius must be nonnegative")
        x0 = complex(check_in_disc(basepoint))
        prune = radius + self.prune_margin(x0)
        cell = 1e-7

        elem_a = [1 + 0j]
        elem_b = [0j]
        parents = [-1]
        letters = [-1]
        buckets = {(0, 0): [0]}
        images = [x0]
        frontier = np.array([0])

        for depth in range(self.word_cap):
            if frontier.size == 0:
                break
            fa = np.asarray(elem_a, dtype=complex)[frontier]
            fb = np.asarray(elem_b, dtype=complex)[frontier]
            na, nb = compose(fa[:, None], fb[:, None], self.gen_a[None, :], self.gen_b[None, :])
            img = mobius(na, nb, x0)
            disp = disc_distance(x0, img)
            last = np.asarray(letters)[frontier]
            backtrack = (last[:, None] >= 0) & ((last[:, None] + 4) % 8 == np.arange(8)[None, :])
            keep = (disp <= prune) & ~backtrack

            rows, cols = np.nonzero(keep)
            ix = np.floor(img.real[rows, cols] / cell).astype(np.int64)
            iy = np.floor(img.imag[rows, cols] / cell).astype(np.int64)
            new_frontier = []
            for r, c, kx, ky in zip(rows, cols, ix, iy):
                z = img[r, c]
                found = False
                for dx in (-1, 0, 1):
                    for dy in (-1, 0, 1):
                        for j in buckets.get((kx + dx, ky + dy), ()):
                            if abs(images[j] - z) < 10 * cell:
                                g = MobiusElement(elem_a[j], elem_b[j])
                                if g.same_element(MobiusElement(na[r, c], nb[r, c])):
                                    found = True
                                    break
                        if found:
                            break
                    if found:
                        break
                if found:
                    continue
                idx = len(elem_a)
                elem_a.append(complex(na[r, c]))
                elem_b.append(complex(nb[r, c]))
                parents.append(int(frontier[r]))
                letters.append(int(c))
                images.append(z)
                buckets.setdefault((kx, ky), []).append(idx)
                new_frontier.append(idx)
                if idx + 1 > cap:
                    raise ResourceError(
                        f"octagon enumeration exceeded the element cap {cap}", idx + 1)
            log.debug("depth %d: %d new elements", depth + 1, len(new_frontier))
            frontier = np.asarray(new_frontier, dtype=int)
        else:
            if frontier.size:
                raise ResourceError(
                    f"word-length cap {self.word_cap} reached before the ball closed",
                    len(elem_a))

        a = np.asarray(elem_a, dtype=complex)
        b = np.asarray(elem_b, dtype=complex)
        disp = disc_distance(x0, np.asarray(images))
        inside = np.nonzero(disp <= radius + 1e-12)[0]
        words = self._words(np.asarray(parents), np.asarray(letters), inside)
        a, b = psu_normalize(a[inside], b[inside])
        disp = disp[inside]
        order = np.lexsort((b.imag, b.real, a.imag, a.real, np.round(disp, 12)))
        data = {"a": a[order], "b": b[order], "words": words[order]}
        log.debug("octagon ball of radius %.2f: %d elements (%d explored)",
                  radius, len(order), len(elem_a))
        return EnumeratedGroup(self, data, disp[order], x0, radius)

    @staticmethod
    def _words(parents, letters, indices):
        """Padded words (-1 fill) by walking the breadth-first tree back to the root"""
        cols = []
        idx = indices.copy()
        while np.any(idx > 0):
            cols.append(np.where(idx > 0, letters[np.maximum(idx, 0)], -1))
            idx = np.where(idx > 0, parents[np.maximum(idx, 0)], 0)
        if not cols:
            return np.full((len(indices), 0), -1, dtype=np.int8)
        # Collected last letter first
        return np.stack(cols[::-1], axis=1).astype(np.int8)

    def element_at(self, data, i):
        word = tuple(int(k) for k in data["words"][i] if k >= 0)
        return MobiusElement(complex(data["a"][i]), complex(data["b"][i]), word)

    def apply_packed(self, data, z):
        z = np.asarray(z, dtype=complex)
        return mobius(_expand(data["a"], z), _expand(data["b"], z), z[None, ...])

    def _denominator(self, data, z):
        z = np.asarray(z, dtype=complex)
        return np.conj(_expand(data["b"], z)) * z[None, ...] + np.conj(_expand(data["a"], z))

    def phase_packed(self, data, z, N):
        c = self._denominator(data, z)
        return (c / np.abs(c)) ** (2 * N)

    def automorphy_packed(self, data, z, N):
        return self._denominator(data, z) ** (2 * N)

    def translation_length(self, element):
        return float(translation_length(element.a))

    def translation_lengths(self, data):
        return translation_length(data["a"])

    def displacement_min(self, element, grid=24):
        """Minimum of d(x, g x) over the closed octagon, with the minimizing point"""
        if element.is_identity:
            return DisplacementResult(0.0, 0j, True)
        r = np.tanh(0.5 * self.domain.circumradius)
        xs = np.linspace(-r, r, grid)
        pts = (xs[:, None] + 1j * xs[None, :]).ravel()
        pts = pts[np.abs(pts) < r]
        pts = pts[self.domain.contains(pts)]
        values = disc_distance(pts, element.apply(pts))
        start = pts[np.argmin(values)]

        def objective(p):
            z = complex(p[0], p[1])
            if abs(z) >= r or not self.domain.contains(np.array([z]))[0]:
                return 1e3 + abs(z)
            return float(disc_distance(z, element.apply(z)))

        res = minimize(objective, [start.real, start.imag], method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
        point = complex(res.x[0], res.x[1])
        return DisplacementResult(float(res.fun), point, False)
