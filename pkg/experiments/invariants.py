"""Structural identities of the kernels, groups and sums on the torus (and the octagon cocycle)."""
import numpy as np

from experiments.base import Experiment, VerificationReport
from objects.groups import OctagonGroup
from objects.kernels import LiftedPoint
from utils.cover_kernels import disc_unitary
from utils.poincare import gamma_sum_matrix, gamma_sum_terms, gamma_sum_unitary
from utils.summation import compensated_sum

# Ball of disc elements whose words reach length two
DISC_RADIUS = 4.5


def hermitian_defect(M):
    """max |M - M*| relative to the largest diagonal entry"""
    return float(np.max(np.abs(M - M.conj().T)) / np.max(np.abs(np.diag(M))))


def psd_margin(M):
    """Smallest eigenvalue of the hermitian part over the trace"""
    H = 0.5 * (M + M.conj().T)
    return float(np.linalg.eigvalsh(H).min() / np.real(np.trace(H)))


def cocycle_defect(g1, g2, z, N):
    """max |J(g1 g2, z) - J(g1, g2 z) J(g2, z)| / |J(g1 g2, z)|"""
    whole = g1.compose(g2).automorphy(z, N)
    split = g1.automorphy(g2.apply(z), N) * g2.automorphy(z, N)
    return float(np.max(np.abs(whole - split) / np.abs(whole)))


def disc_equivariance_defect(enumeration, z, w, t):
    """max over elements and pairs of |U(gz, gw) - psi(g, z) conj(psi(g, w)) U(z, w)|"""
    expected = (enumeration.unitary_phase(z, t) * np.conj(enumeration.unitary_phase(w, t))
                * disc_unitary(z, w, t))
    moved = disc_unitary(enumeration.apply(z), enumeration.apply(w), t)
    return float(np.max(np.abs(moved - expected)))


def random_lattice_elements(group, rng, count, span=3):
    m = rng.integers(-span, span + 1, count)
    n = rng.integers(-span, span + 1, count)
    return [group.element(a, b) for a, b in zip(m, n)]


def random_words(group, rng, count, length=3):
    words = rng.integers(0, 8, (count, length))
    return [group.word(tuple(w)) for w in words]


class Invariants(Experiment):
    """Hermitian symmetry, positivity, cocycle, equivariance, lift phases and summation order"""
    experiment_id = "invariants"
    model = "flat"
    N = 3
    radius = None

    def setup(self):
        self.space = self.build_space()
        self.radius = self.radius or self.config["torus"]["radius"] or 8.0
        self.enumeration = self.enumerate(self.space, self.radius)

    def construct(self):
        verification = self.config["verification"]
        space, N, rng = self.space, self.N, self.rng
        v = space.tau.imag
        points = space.sample_points(rng, verification["invariant_points"])

        M = gamma_sum_matrix(space, self.enumeration, points, points, N, threads=self.threads)
        hermitian = hermitian_defect(M)
        psd = psd_margin(M)

        triples = verification["cocycle_triples"]
        lattice = space.group
        zs = space.sample_points(rng, triples)
        firsts = random_lattice_elements(lattice, rng, triples)
        seconds = random_lattice_elements(lattice, rng, triples)
        cocycle_flat = max(cocycle_defect(g1, g2, z, N) for g1, g2, z in zip(firsts, seconds, zs))

        octagon = OctagonGroup(word_cap=self.config["caps"]["word_length"])
        radii = np.tanh(0.5 * rng.uniform(0.0, 1.0, triples))
        disc_points = radii * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, triples))
        words_a = random_words(octagon, rng, triples)
        words_b = random_words(octagon, rng, triples)
        cocycle_disc = max(cocycle_defect(g1, g2, z, N)
                           for g1, g2, z in zip(words_a, words_b, disc_points))

        x, y = points[0], points[1]
        base = gamma_sum_unitary(space, self.enumeration, x, y, N)
        cover = space.cover_unitary(x, y, N)
        group = self.enumeration
        expected = group.unitary_phase(x, N) * np.conj(group.unitary_phase(y, N)) * cover
        moved_cover = space.cover_unitary(group.apply(x), group.apply(y), N)
        cover_equivariance = float(np.max(np.abs(moved_cover - expected))) * v / N
        # Shifts inside half the ball, so the shifted truncation loses only negligible terms
        inner = group.restrict(0.5 * self.radius)
        moved = gamma_sum_unitary(space, group, inner.apply(x), y, N, threads=self.threads)
        equivariance = float(np.max(np.abs(moved - inner.unitary_phase(x, N) * base))) * v / N
        periodicity = float(np.max(np.abs(np.abs(moved) - abs(base)))) * v / N

        disc_group = octagon.enumerate(0j, DISC_RADIUS, cap=self.config["caps"]["elements"])
        disc_equivariance = disc_equivariance_defect(disc_group, disc_points, disc_points[::-1], N)

        lift_x, lift_y = LiftedPoint(x, rng.uniform(0, 2 * np.pi)), LiftedPoint(y, 0.3)
        alpha = float(rng.uniform(0, 2 * np.pi))
        lifted = space.lift_kernel(lift_x, lift_y, N)
        turned_x = space.lift_kernel(lift_x.rotated(alpha), lift_y, N)
        turned_y = space.lift_kernel(lift_x, lift_y.rotated(alpha), N)
        lift_phase = max(
            abs(turned_x - np.exp(1j * N * alpha) * lifted),
            abs(turned_y - np.exp(-1j * N * alpha) * lifted),
        ) * v / N

        far = np.concatenate([points, points + 2.0 - 3.0 * space.tau])
        diagonal = np.abs(space.cover_unitary(far, far, N)) * v / N
        diagonal_spread = float(np.ptp(diagonal))

        terms = gamma_sum_terms(space, self.enumeration, x, y, N)
        sums = [compensated_sum(terms, axis=0, order=order)
                for order in ("descending", "ascending", None)]
        scale = float(np.sum(np.abs(terms)))
        ordering = max(abs(s - sums[0]) for s in sums) / scale

        report = VerificationReport(
            experiment_id=f"{self.experiment_id}-N{self.N}",
            parameters={
                "model": space.describe(),
                "N": N,
                "radius": self.radius,
                "points": len(points),
                "triples": triples,
                "seed": self.config.seed,
            },
            metrics={"elements_used": len(self.enumeration), "disc_elements": len(disc_group)},
        )
        report.check("hermitian_symmetry", hermitian, "<=", 1e-10)
        report.check("psd_margin", psd, ">=", -1e-8)
        report.check("cocycle_flat", cocycle_flat, "<", 1e-10)
        report.check("cocycle_disc", cocycle_disc, "<", 1e-10)
        report.check("gamma_equivariance", float(equivariance), "<", 1e-8)
        report.check("cover_equivariance", float(cover_equivariance), "<", 1e-8)
        report.check("disc_equivariance", disc_equivariance, "<", 1e-10)
        report.check("gamma_periodicity", float(periodicity), "<", 1e-8)
        report.check("lift_phase_law", float(lift_phase), "<=", 1e-12)
        report.check("diagonal_constancy", diagonal_spread, "<=", 1e-12)
        report.check("ordering_stability", float(ordering), "<=", 1e-14)
        return report
