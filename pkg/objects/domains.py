"""Fundamental domains for the two model quotients."""
import numpy as np

from utils.errors import DomainError
from utils.hyperbolic import (
    check_in_disc,
    compose,
    disc_distance,
    inverse,
    mobius,
)


class ParallelogramDomain:
    """Period parallelogram {s + t tau : s, t in [0, 1)} of the lattice Z + tau Z"""

    def __init__(self, tau):
        tau = complex(tau)
        if tau.imag <= 0:
            raise DomainError(f"lattice modulus needs Im tau > 0, got {tau}")
        self.tau = tau
        self.vertices = np.array([0, 1, 1 + tau, tau], dtype=complex)
        self.center = 0.5 * (1 + tau)

    @property
    def area(self):
        return self.tau.imag

    @property
    def cell_radius(self):
        """Circumradius of the centred period cell, used by lattice tail bounds"""
        return 0.5 * max(abs(1 + self.tau), abs(1 - self.tau))

    @property
    def diameter(self):
        return max(abs(1 + self.tau), abs(1 - self.tau))

    def coordinates(self, z):
        """Real coordinates (s, t) with z = s + t tau"""
        z = np.asarray(z, dtype=complex)
        t = z.imag / self.tau.imag
        s = z.real - t * self.tau.real
        return s, t

    def contains(self, z, tol=1e-12):
        s, t = self.coordinates(z)
        return (s >= -tol) & (s < 1 + tol) & (t >= -tol) & (t < 1 + tol)

    def reduce(self, z):
        """Translate z into the domain; returns (reduced point, (m, n)) with z = z' + m + n tau"""
        s, t = self.coordinates(z)
        m = np.floor(s).astype(int)
        n = np.floor(t).astype(int)
        reduced = np.asarray(z, dtype=complex) - m - n * self.tau
        return reduced, (m, n)

    def boundary(self, samples=64):
        """Closed polyline around the parallelogram, for plotting"""
        corners = np.append(self.vertices, self.vertices[0])
        pieces = [
            np.linspace(corners[k], corners[k + 1], samples, endpoint=False)
            for k in range(4)
        ]
        return np.append(np.concatenate(pieces), corners[0])


class OctagonDomain:
    """Regular hyperbolic octagon centred at 0, the Dirichlet domain of the octagon group

    Side k has its midpoint in direction k*pi/4; the generator with index k
    carries side k+4 onto side k.
    """

    def __init__(self, generator_a, generator_b, side_distance):
        self.generator_a = np.asarray(generator_a, dtype=complex)
        self.generator_b = np.asarray(generator_b, dtype=complex)
        self.side_distance = side_distance
        # Right triangle centre/midpoint/vertex has angles pi/8, pi/2, pi/8
        self.circumradius = np.arccosh(1.0 / np.tan(np.pi / 8) ** 2)
        vertex_radius = np.tanh(0.5 * self.circumradius)
        self.vertices = vertex_radius * np.exp(1j * np.pi * (2 * np.arange(8) + 1) / 8)
        self.center = 0j
        # Images of the centre under the side pairings, used by the Dirichlet test
        self.neighbor_centers = mobius(self.generator_a, self.generator_b, 0j)

    @property
    def area(self):
        # Gauss-Bonnet for genus 2 at curvature -1
        return 4 * np.pi

    @property
    def diameter(self):
        return 2 * self.circumradius

    def contains(self, z, tol=1e-12):
        z = check_in_disc(z)
        d0 = disc_distance(0j, z)
        dk = disc_distance(self.neighbor_centers[:, None], z.reshape(1, -1))
        inside = np.all(d0.reshape(1, -1) <= dk + tol, axis=0)
        return inside.reshape(z.shape)

    def reduce(self, z, max_steps=200):
        """Move z into the domain; returns (reduced point, (a, b)) with reduced = g(z)"""
        z = check_in_disc(z)
        flat = z.reshape(-1).copy()
        acc_a = np.ones_like(flat)
        acc_b = np.zeros_like(flat)
        for _ in range(max_steps):
            d0 = disc_distance(0j, flat)
            dk = disc_distance(self.neighbor_centers[:, None], flat[None, :])
            nearest = np.argmin(dk, axis=0)
            outside = dk[nearest, np.arange(flat.size)] < d0 - 1e-14
            if not np.any(outside):
                break
            # Pull the point back across the side it crossed
            ga, gb = inverse(self.generator_a[nearest], self.generator_b[nearest])
            new_z = mobius(ga, gb, flat)
            new_a, new_b = compose(ga, gb, acc_a, acc_b)
            flat = np.where(outside, new_z, flat)
            acc_a = np.where(outside, new_a, acc_a)
            acc_b = np.where(outside, new_b, acc_b)
        return flat.reshape(z.shape), (acc_a.reshape(z.shape), acc_b.reshape(z.shape))

    def side_arc(self, k, u):
        """Point of side k at parameter u in [0, 1] and its u-derivative

        The side is the image of a segment of the imaginary axis under the
        translation along direction k*pi/4 that carries 0 to the side midpoint.
        """
        m = np.tanh(0.5 * self.side_distance)
        # Half-length of the preimage segment, from the vertex V_0
        v0 = self.vertices[0]
        y0 = ((v0 - m) / (1 - m * v0)).imag
        iy = 1j * (-y0 + 2 * y0 * np.asarray(u, dtype=float))
        rot = np.exp(1j * np.pi * k / 4)
        point = rot * (iy + m) / (1 + m * iy)
        derivative = rot * (1 - m * m) / (1 + m * iy) ** 2 * (2j * y0)
        return point, derivative

    def boundary(self, samples=64):
        u = np.linspace(0.0, 1.0, samples, endpoint=False)
        pieces = [self.side_arc(k, u)[0] for k in range(8)]
        # Side 0 starts at V_7 and ends at V_0
        closed = np.concatenate(pieces)
        return np.append(closed, closed[0])
