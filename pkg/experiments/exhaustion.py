"""Unbounded sections along a divergent orbit, and the L^2 reproducing identity on the plane.

Orbit points x_j = gamma_j x0 are picked greedily, nearest first, under
  (depth)       d(x_j) >= j
  (increasing)  d(x_j) > d(x_{j-1})
  (spread)      inf_{i<j} d(x_i, x_j) >= 1/2 sup_{i<j} d(x_i, x_j)
  (separation)  inf_{i<j} d(x_i, x_j) >= separation
where d(x) is the distance to the basepoint of the cover.
"""
from dataclasses import dataclass, field

import numpy as np

from experiments.base import Experiment, VerificationReport
from utils.hyperbolic import mobius
from utils.logger import log
from utils.quadrature import plane_disc_quadrature


@dataclass
class OrbitSelection:
    points: list = field(default_factory=list)
    depths: list = field(default_factory=list)
    failed_index: int | None = None
    failed_condition: str | None = None

    @property
    def complete(self):
        return self.failed_index is None


def first_violation(space, candidate, depth, chosen, depths, j, separation):
    """Name of the first condition a candidate breaks as the j-th point, or None"""
    if depth < j:
        return "depth"
    if depths and depth <= depths[-1]:
        return "increasing"
    if chosen:
        gaps = space.distance(candidate, np.asarray(chosen))
        if gaps.min() < 0.5 * gaps.max():
            return "spread"
        if gaps.min() < separation:
            return "separation"
    return None


def select_orbit(space, orbit, K, separation=0.0):
    """Greedy choice of K orbit points ordered by (distance, angle)"""
    orbit = np.asarray(orbit, dtype=complex)
    base = space.basepoint
    depths = np.asarray(space.distance(base, orbit), dtype=float)
    angles = np.mod(np.angle(orbit - base), 2 * np.pi)
    order = np.lexsort((angles, np.round(depths, 12)))
    selection = OrbitSelection()
    start = 0
    for j in range(1, K + 1):
        last = None
        for position in range(start, len(order)):
            i = order[position]
            last = first_violation(space, orbit[i], depths[i], selection.points,
                                   selection.depths, j, separation)
            if last is None:
                selection.points.append(complex(orbit[i]))
                selection.depths.append(float(depths[i]))
                start = position + 1
                break
        else:
            selection.failed_index = j
            selection.failed_condition = last or "depth"
            log.warning("orbit selection stops at point %d: %s condition", j,
                        selection.failed_condition)
            break
    return selection


def approach_points(space, points, directions, offset=0.5):
    """y_k at distance offset / k from x_k along the unit direction u_k"""
    points = np.asarray(points, dtype=complex)
    steps = offset / np.arange(1, len(points) + 1)
    if space.kind == "flat":
        return points + steps * directions
    # Isometry carrying 0 to x_k applied to the point at distance step from 0
    local = np.tanh(0.5 * steps) * directions
    a = 1.0 / np.sqrt(1.0 - np.abs(points) ** 2)
    return mobius(a + 0j, a * points, local)


def divergent_section(space, points, depths, z, N):
    """s(z) = sum_j e^{d(x_j)} Pi(z, x_j) in the unitary frame"""
    z = np.asarray(z, dtype=complex)
    terms = [np.exp(d) * space.cover_unitary(z, x, N) for x, d in zip(points, depths)]
    return np.sum(terms, axis=0)


def l2_reproducing_residual(space, z, N, radius, n_radial=128, n_angular=128):
    """Relative gap between int |Pi(z, w)|^2 dA(w) over a disc and Pi(z, z)"""
    quad = plane_disc_quadrature(z, radius, n_radial, n_angular)
    mass = quad.integrate(np.abs(space.cover_unitary(z, quad.nodes, N)) ** 2)
    diagonal = abs(complex(space.cover_unitary(z, z, N)))
    return abs(float(mass) - diagonal) / diagonal


class Exhaustion(Experiment):
    """Growth of the K-term section at targets approaching the chosen orbit points"""
    experiment_id = "exhaustion"
    model = "flat"
    N = None
    K = None

    def setup(self):
        exhaustion = self.config["exhaustion"]
        self.space = self.build_space()
        self.N = self.N or exhaustion["N"]
        self.K = self.K or exhaustion["K"]
        re, im = exhaustion["basepoint"]
        if self.space.kind == "flat":
            self.x0 = complex(re, im)
        else:
            # Orbit of a generic interior point of the octagon
            self.x0 = complex(re, im) * 0.25
        # Every candidate satisfies depth >= j, so cover a few spare shells beyond K
        radius = 2.0 * self.K + exhaustion["separation"] + 2.0
        if self.space.kind == "hyperbolic":
            radius = min(radius, self.config["fuchsian"]["max_radius"])
        self.enumeration = self.enumerate(self.space, radius)

    def construct(self):
        exhaustion = self.config["exhaustion"]
        orbit = self.enumeration.apply(self.x0)
        selection = select_orbit(self.space, orbit, self.K, exhaustion["separation"])
        report = VerificationReport(
            experiment_id=f"{self.experiment_id}-{self.space.kind}-N{self.N}",
            parameters={
                "model": self.space.describe(),
                "N": self.N,
                "K": self.K,
                "x0": self.x0,
                "separation": exhaustion["separation"],
                "seed": self.config.seed,
            },
        )
        if not selection.complete:
            report.flag(f"{selection.failed_condition}_condition_violated")
            report.metrics["violated_index"] = selection.failed_index
            report.check("orbit_points", len(selection.points), "==", self.K)
            return report

        points, depths = selection.points, selection.depths
        directions = np.exp(1j * self.rng.uniform(0.0, 2 * np.pi, len(points)))
        targets = approach_points(self.space, points, directions, exhaustion["approach_offset"])
        diagonal = np.abs([complex(self.space.cover_unitary(y, x, self.N))
                           for y, x in zip(targets, points)])
        c = float(diagonal.min())
        growth = np.abs(divergent_section(self.space, points, depths, targets, self.N))
        lower = 0.5 * c * np.exp(depths)

        report.metrics.update({
            "points": points,
            "depths": depths,
            "targets": targets,
            "section_norms": growth,
            "lower_bounds": lower,
            "c_estimate": c,
        })
        report.check("strictly_increasing", bool(np.all(np.diff(growth) > 0)), "==", True)
        report.check("above_lower_bound", bool(np.all(growth >= lower)), "==", True)

        if self.space.kind == "flat":
            count = min(exhaustion["reproducing_points"], len(targets))
            radius = exhaustion["reproducing_radius"]
            gaps = [l2_reproducing_residual(self.space, y, self.N, radius)
                    for y in targets[:count]]
            report.residuals = gaps
            report.metrics["reproducing_relative_errors"] = gaps
            report.check("reproducing_identity", max(gaps), "<=",
                         exhaustion["reproducing_tolerance"])
        return report
