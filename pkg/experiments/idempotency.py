"""Matrix realization of the summed kernel on a quadrature grid and its projector defects."""
import numpy as np

from experiments.base import Experiment, VerificationReport
from utils.poincare import gamma_sum_matrix
from utils.quadrature import domain_quadrature
from utils.quotient import basis_kernel_matrix


def projector_matrix(kernel, weights):
    """A = W^{1/2} K W^{1/2}, so that A is a projector exactly when K reproduces on the grid"""
    root = np.sqrt(np.asarray(weights, dtype=float))
    return root[:, None] * kernel * root[None, :]


def projector_defects(A):
    """(||A^2 - A||_op, ||A - A*||_op)"""
    return (
        float(np.linalg.norm(A @ A - A, 2)),
        float(np.linalg.norm(A - A.conj().T, 2)),
    )


class Idempotency(Experiment):
    """Operator-norm idempotency and self-adjointness of the summed kernel on the torus grid"""
    experiment_id = "idempotency"
    model = "flat"
    N = None            # Defaults to verification.idempotency_N
    nodes = None        # Grid points per side
    radius = None
    source = "gamma-sum"    # or "basis"
    tolerance = None
    expect_failure = False

    def setup(self):
        verification = self.config["verification"]
        self.space = self.build_space()
        self.N = self.N or verification["idempotency_N"]
        self.nodes = self.nodes or verification["idempotency_nodes"]
        self.radius = self.radius or verification["idempotency_radius"]
        self.tolerance = self.tolerance or verification["idempotency_tolerance"]
        if self.source == "gamma-sum":
            self.enumeration = self.enumerate(self.space, self.radius)
        else:
            self.basis = self.theta_basis(self.space, self.N)

    def kernel_matrix(self, nodes):
        if self.source == "basis":
            return basis_kernel_matrix(self.basis, nodes, nodes)
        return gamma_sum_matrix(self.space, self.enumeration, nodes, nodes, self.N,
                                threads=self.threads)

    def defects(self, n):
        quad = domain_quadrature(self.space, n)
        A = projector_matrix(self.kernel_matrix(quad.nodes), quad.weights)
        return projector_defects(A)

    def construct(self):
        idempotency, symmetry = self.defects(self.nodes)
        coarse = max(self.nodes * 3 // 4, 2)
        coarse_idempotency, _ = self.defects(coarse)
        # A grid is too coarse when refinement moves the estimate by more than the tolerance
        drift = abs(idempotency - coarse_idempotency)

        report = VerificationReport(
            experiment_id=f"{self.experiment_id}-{self.source}-N{self.N}",
            parameters={
                "model": self.space.describe(),
                "N": self.N,
                "grid": [self.nodes, self.nodes],
                "coarse_grid": [coarse, coarse],
                "radius": self.radius if self.source == "gamma-sum" else None,
                "source": self.source,
                "seed": self.config.seed,
            },
            residuals=[idempotency, symmetry],
            metrics={
                "idempotency": idempotency,
                "self_adjointness": symmetry,
                "coarse_idempotency": coarse_idempotency,
                "refinement_drift": drift,
            },
            expect_failure=self.expect_failure,
        )
        report.check("idempotency", idempotency, "<=", self.tolerance)
        report.check("self_adjointness", symmetry, "<=", self.tolerance)
        if drift > self.tolerance:
            report.flag("grid_unstable")
        if self.source == "gamma-sum":
            report.metrics["elements_used"] = len(self.enumeration)
        return report
