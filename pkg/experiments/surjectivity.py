"""Reconstruct an orthonormal basis from Poincare series of upstairs peak sections."""
import numpy as np

from experiments.base import Experiment, VerificationReport
from objects.sections import PeakSection
from utils.logger import log
from utils.poincare import poincare_map
from utils.quadrature import domain_quadrature

SINGULAR_CONDITION = 1e8


def weighted_lstsq(columns, targets, weights):
    """Coefficients c minimizing sum_nodes w |targets - columns c|^2, one column of c per target"""
    root = np.sqrt(np.asarray(weights, dtype=float))[:, None]
    coefficients, *_ = np.linalg.lstsq(root * columns, root * targets, rcond=None)
    residual = targets - columns @ coefficients
    errors = np.sqrt(np.sum(np.asarray(weights)[:, None] * np.abs(residual) ** 2, axis=0))
    return coefficients, errors


class Surjectivity(Experiment):
    """Every orthonormal section is a combination of the P Phi^{w_k} for d_N generic centres

    On the disc the columns are the Gamma-sums of the cover kernel, which
    carry the unknown global scale; the least-squares solve absorbs it.
    """
    experiment_id = "surjectivity"
    model = "flat"
    N = 3
    radius = None
    nodes = None
    tolerance = None
    retries = None

    def setup(self):
        verification = self.config["verification"]
        self.space = self.build_space()
        self.retries = self.retries or verification["surjectivity_retries"]
        self.stats = None
        if self.space.kind == "flat":
            self.radius = self.radius or self.config["torus"]["radius"] or 8.0
            self.nodes = self.nodes or self.config["quadrature"]["torus_nodes"]
            self.tolerance = self.tolerance or verification["surjectivity_tolerance"]
            self.enumeration = self.enumerate(self.space, self.radius)
            self.basis = self.theta_basis(self.space, self.N)
        else:
            self.nodes = self.nodes or self.config["quadrature"]["octagon_nodes"]
            self.tolerance = self.tolerance or self.config["fuchsian"]["residual_tolerance"]
            samples = self.space.sample_points(self.rng, 2 * self.config["fuchsian"]["pairs"])
            self.stats, self.enumeration = self.disc_enumeration(self.space, self.N, samples)
            self.radius = self.enumeration.radius
            self.basis = self.poincare_basis(self.space, self.N, self.enumeration)
        self.quad = domain_quadrature(self.space, self.nodes)

    def report_id(self):
        if self.space.kind == "flat":
            return f"{self.experiment_id}-N{self.N}"
        return f"{self.experiment_id}-fuchsian-t{self.N}"

    def peak_columns(self, centers):
        columns, tails = [], []
        for w in centers:
            values, cert = poincare_map(
                self.space, PeakSection(self.space, w, self.N), self.quad.nodes, self.N,
                enumeration=self.enumeration, stats=self.stats, threads=self.threads,
            )
            columns.append(values)
            tails.append(cert.tail_bound)
        return np.stack(columns, axis=1), max(tails)

    def choose_centers(self, d):
        """Centres whose system [conj S_j(w_k)] is well conditioned, with the attempt count"""
        for attempt in range(1, self.retries + 1):
            centers = self.space.sample_points(self.rng, d)
            system = np.conj(self.basis.evaluate(centers))
            condition = float(np.linalg.cond(system))
            if condition < SINGULAR_CONDITION:
                return centers, condition, attempt, False
            log.info("surjectivity: centres rejected, condition %.2e (attempt %d)",
                     condition, attempt)
        return centers, condition, self.retries, True

    def construct(self):
        d = self.basis.rank
        centers, condition, attempts, singular = self.choose_centers(d)
        columns, tail = self.peak_columns(centers)
        targets = self.basis.evaluate(self.quad.nodes).T
        coefficients, errors = weighted_lstsq(columns, targets, self.quad.weights)
        # Expressing the first peak section through itself
        self_coefficient, self_error = weighted_lstsq(columns[:, :1], columns[:, :1],
                                                      self.quad.weights)

        report = VerificationReport(
            experiment_id=self.report_id(),
            parameters={
                "model": self.space.describe(),
                "N": self.N,
                "radius": self.radius,
                "quadrature": self.quad.description,
                "centers": [[w.real, w.imag] for w in centers],
                "seed": self.config.seed,
            },
            residuals=errors.tolist(),
            metrics={
                "condition_number": condition,
                "attempts": attempts,
                "d_N": d,
                "coefficients_norm": float(np.linalg.norm(coefficients)),
                "self_coefficient": complex(self_coefficient[0, 0]),
                "self_residual": float(self_error[0]),
                "max_tail_bound": tail,
            },
        )
        report.check("max_residual", report.residual_max, "<=", self.tolerance)
        expected_rank = self.N if self.space.kind == "flat" else 2 * self.N - 1
        report.check("d_N", d, "==", expected_rank)
        report.check("condition_number", condition, "<", SINGULAR_CONDITION)
        if singular:
            report.flag("singular_centers")
        return report
