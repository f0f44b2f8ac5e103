"""Non-verifying runs: group cache builds and kernel grids for plots."""
import numpy as np

from experiments.base import Experiment, VerificationReport
from utils.errors import ResourceError
from utils.poincare import gamma_sum_unitary


class GroupCensus(Experiment):
    """Enumerate (and cache) the group ball of a radius, with its growth statistics"""
    experiment_id = "enumerate"
    model = "flat"
    radius = None

    def setup(self):
        self.space = self.build_space()
        if self.radius is None:
            if self.space.kind == "flat":
                self.radius = self.config["torus"]["radius"] or 8.0
            else:
                self.radius = self.config["fuchsian"]["max_radius"]
        self.enumeration = self.enumerate(self.space, self.radius)

    def construct(self):
        self.stats = None
        metrics = {"count": len(self.enumeration)}
        try:
            self.stats = self.space.group.stats(self.enumeration)
        except ResourceError:
            pass
        if self.stats is not None:
            metrics.update({
                "systole": self.stats.systole,
                "growth": [self.stats.growth_a, self.stats.growth_b],
                "table": [self.stats.radii, self.stats.counts],
            })
        return VerificationReport(
            experiment_id=f"{self.experiment_id}-{self.space.kind}",
            parameters={"model": self.space.describe(), "radius": self.radius,
                        "caps": dict(self.config["caps"])},
            metrics=metrics,
        )


class KernelGrid(Experiment):
    """Pointwise norm of the summed kernel Pi(., w0) on a square grid over the fundamental domain"""
    experiment_id = "kernel-grid"
    model = "flat"
    N = 2
    grid = None
    center = None

    def setup(self):
        self.space = self.build_space()
        self.grid = self.grid or self.config["output"]["grid"]
        if self.space.kind == "flat":
            self.center = 0.5 * (1 + self.space.tau) if self.center is None else self.center
            self.enumeration = self.enumerate(self.space, self.config["torus"]["radius"] or 8.0)
            self.stats = None
        else:
            self.center = 0j if self.center is None else self.center
            corners = self.space.domain.boundary(8)
            self.stats, self.enumeration = self.disc_enumeration(self.space, self.N, corners * 0.99)

    def sample_grid(self):
        if self.space.kind == "flat":
            s = (np.arange(self.grid) + 0.5) / self.grid
            ss, tt = np.meshgrid(s, s, indexing="xy")
            return ss + tt * self.space.tau, np.ones(ss.shape, dtype=bool)
        boundary = self.space.domain.boundary()
        edge = float(np.max(np.abs(boundary)))
        axis = np.linspace(-edge, edge, self.grid)
        xx, yy = np.meshgrid(axis, axis, indexing="xy")
        points = xx + 1j * yy
        inside = np.abs(points) < 1.0
        inside[inside] = self.space.domain.contains(points[inside])
        return points, inside

    def construct(self):
        self.points, inside = self.sample_grid()
        self.values = np.full(self.points.shape, np.nan, dtype=complex)
        targets = self.points[inside]
        rows = []
        for start in range(0, targets.size, 256):
            rows.append(gamma_sum_unitary(self.space, self.enumeration,
                                          targets[start:start + 256], self.center, self.N,
                                          threads=self.threads))
        self.values[inside] = np.concatenate(rows) if rows else []
        norms = np.abs(self.values[inside])
        return VerificationReport(
            experiment_id=f"{self.experiment_id}-{self.space.kind}-N{self.N}",
            parameters={
                "model": self.space.describe(),
                "N": self.N,
                "grid": [self.grid, self.grid],
                "center": self.center,
                "radius": self.enumeration.radius,
            },
            metrics={
                "points": int(inside.sum()),
                "max_norm": float(norms.max()) if norms.size else 0.0,
                "min_norm": float(norms.min()) if norms.size else 0.0,
            },
        )

    def rows(self):
        """(x, y, re, im, norm) for every evaluated grid point"""
        mask = np.isfinite(self.values)
        z = self.points[mask]
        u = self.values[mask]
        return np.column_stack([z.real, z.imag, u.real, u.imag, np.abs(u)])
