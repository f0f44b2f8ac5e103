import numpy as np
import pytest
from numpy.testing import assert_allclose

from experiments.agmon import AgmonFit, DoublingTest
from experiments.base import (
    CERTIFICATE_INVALID,
    RELATIONS,
    THRESHOLD_STATUS,
    VerificationReport,
    evaluate_payload,
)
from experiments.exhaustion import (
    Exhaustion,
    approach_points,
    divergent_section,
    first_violation,
    select_orbit,
)
from experiments.exports import GroupCensus, KernelGrid
from experiments.idempotency import Idempotency, projector_defects, projector_matrix
from experiments.invariants import Invariants, hermitian_defect, psd_margin
from experiments.kernel_identity import (
    FuchsianKernelIdentity,
    TorusKernelIdentity,
    fit_global_scale,
    identity_only_radius,
)
from experiments.surjectivity import Surjectivity, weighted_lstsq
from utils.config import CACHE_ENV
from utils.hyperbolic import disc_distance


def payload(**changes):
    base = {
        "checks": {"max_residual": [1e-9, "<=", 1e-6], "d_N": [3, "==", 3]},
        "residuals": [1e-9, 5e-10],
        "budget": {"tail": 1e-10, "slack": 1e-8},
        "flags": [],
        "expect_failure": False,
    }
    base.update(changes)
    return base


def test_payload_evaluation():
    assert evaluate_payload(payload())
    assert not evaluate_payload(payload(checks={"d_N": [2, "==", 3]}))
    assert not evaluate_payload(payload(residuals=[1e-7]))
    assert evaluate_payload(payload(residuals=[1e-7], expect_failure=True))
    assert evaluate_payload(payload(budget={}, residuals=[1e-7]))
    assert not evaluate_payload(payload(flags=[CERTIFICATE_INVALID]))
    assert not evaluate_payload(payload(flags=[CERTIFICATE_INVALID], expect_failure=True))


def test_report_status_and_payload():
    report = VerificationReport("demo", {"N": np.int64(2)}, residuals=[np.float64(0.5), 0.1])
    report.check("max_residual", report.residual_max, "<=", 1.0).flag("gram_flagged")
    report.flag("gram_flagged")
    out = report.to_json(threads=4)
    assert out["payload"]["flags"] == ["gram_flagged"]
    assert out["payload"]["parameters"] == {"N": 2}
    assert out["payload"]["passed"] is True
    assert out["meta"]["threads"] == 4
    assert report.residual_median == pytest.approx(0.3)
    report.flag(CERTIFICATE_INVALID)
    assert report.status == THRESHOLD_STATUS
    assert not report.passed


def test_unknown_parameters_are_refused(config):
    with pytest.raises(AttributeError):
        TorusKernelIdentity(config, radus=3.0)


def test_global_scale_fit():
    basis = np.array([1 + 1j, 0.5 - 2j, -0.3j])
    scale, spread = fit_global_scale(2.5 * basis, basis)
    assert scale == pytest.approx(2.5)
    assert spread == pytest.approx(0.0, abs=1e-12)


def test_identity_only_radius_is_below_the_systole(flat_space, disc_space):
    assert identity_only_radius(flat_space) == pytest.approx(0.5)
    assert identity_only_radius(disc_space) == pytest.approx(np.arccosh(1 + np.sqrt(2)))


def test_projector_defects_of_an_exact_projector(rng):
    Q, _ = np.linalg.qr(rng.normal(size=(6, 2)) + 1j * rng.normal(size=(6, 2)))
    idempotency, symmetry = projector_defects(Q @ Q.conj().T)
    assert idempotency < 1e-14 and symmetry < 1e-14
    assert_allclose(projector_matrix(np.ones((2, 2)), [4.0, 1.0]), [[4.0, 2.0], [2.0, 1.0]])


def test_weighted_lstsq_recovers_exact_combinations(rng):
    columns = rng.normal(size=(20, 3)) + 1j * rng.normal(size=(20, 3))
    coefficients = rng.normal(size=(3, 2))
    solved, errors = weighted_lstsq(columns, columns @ coefficients, rng.uniform(0.5, 1.5, 20))
    assert_allclose(solved, coefficients, atol=1e-12)
    assert np.all(errors < 1e-12)


def test_matrix_diagnostics():
    M = np.array([[2.0, 1j], [-1j, 2.0]])
    assert hermitian_defect(M) == 0.0
    assert psd_margin(M) == pytest.approx(0.25)


def test_orbit_selection_on_the_lattice(flat_space):
    orbit = flat_space.enumerate(12.0).apply(0.5 + 0.5j)
    selection = select_orbit(flat_space, orbit, 5, separation=2.0)
    assert selection.complete
    depths = np.array(selection.depths)
    assert np.all(depths >= np.arange(1, 6))
    assert np.all(np.diff(depths) > 0)
    points = np.array(selection.points)
    for j in range(1, 5):
        gaps = np.abs(points[j] - points[:j])
        assert gaps.min() >= max(2.0, 0.5 * gaps.max())


def test_orbit_selection_reports_the_failing_condition(flat_space):
    orbit = flat_space.enumerate(3.0).apply(0.5 + 0.5j)
    selection = select_orbit(flat_space, orbit, 6)
    assert not selection.complete
    assert selection.failed_index <= 6
    assert selection.failed_condition in ("depth", "increasing", "spread", "separation")


def test_first_violation_order(flat_space):
    assert first_violation(flat_space, 0.5 + 0j, 0.5, [], [], 1, 0.0) == "depth"
    assert first_violation(flat_space, 3 + 0j, 3.0, [4 + 0j], [4.0], 2, 0.0) == "increasing"
    assert first_violation(flat_space, 5 + 0j, 5.0, [4 + 0j], [4.0], 2, 2.0) == "separation"
    assert first_violation(flat_space, 5 + 0j, 5.0, [4 + 0j], [4.0], 2, 0.5) is None


def test_approach_points_close_in(flat_space, disc_space):
    directions = np.exp(1j * np.array([0.1, 2.0, 4.0]))
    flat_points = np.array([2.0, 3.0 + 1j, -4.0j])
    targets = approach_points(flat_space, flat_points, directions)
    assert_allclose(np.abs(targets - flat_points), [0.5, 0.25, 0.5 / 3])
    disc_points = np.array([0.3, 0.5j, -0.7 + 0.1j])
    targets = approach_points(disc_space, disc_points, directions)
    assert_allclose(disc_distance(disc_points, targets), [0.5, 0.25, 0.5 / 3], rtol=1e-10)


def test_divergent_section_single_term(flat_space):
    value = divergent_section(flat_space, [1.0 + 0j], [1.0], 1.0 + 0j, 2)
    assert_allclose(value, np.e * 2.0)


def test_torus_identity_small(config):
    config = config.with_overrides(**{"quadrature.torus_nodes": 32})
    report = TorusKernelIdentity(config, N=1, pairs=3).run()
    assert report.passed
    assert report.metrics["d_N"] == 1
    assert report.residual_max < 1e-8
    assert report.experiment_id == "kernel-identity-torus-N1"


def test_below_threshold_beta_is_flagged(config):
    config = config.with_overrides(**{"quadrature.torus_nodes": 32})
    report = TorusKernelIdentity(config, N=1, pairs=2, beta=1e3).run()
    assert CERTIFICATE_INVALID in report.flags
    assert report.status == THRESHOLD_STATUS
    assert "operational threshold" in report.metrics["reason"]


def test_group_census_of_the_identity(config):
    report = GroupCensus(config, radius=0.0).run()
    assert report.metrics["count"] == 1
    assert report.passed
    assert list(config.cache_dir.glob("flat-*.npz"))


def test_group_census_reuses_its_cache(config):
    first = GroupCensus(config, radius=3.0)
    first.run()
    second = GroupCensus(config, radius=3.0)
    report = second.run()
    assert report.metrics["count"] == 29
    assert len(list(config.cache_dir.glob("flat-*.npz"))) == 1


def test_kernel_grid_rows(config):
    experiment = KernelGrid(config, N=1, grid=6)
    report = experiment.run()
    rows = experiment.rows()
    assert rows.shape == (36, 5)
    assert_allclose(rows[:, 4], np.hypot(rows[:, 2], rows[:, 3]))
    assert report.metrics["points"] == 36


def test_doubling_test_holds(config):
    report = DoublingTest(config, pairs=20).run()
    assert report.passed
    assert report.metrics["held"] == 20


def test_agmon_fits(config):
    assert AgmonFit(config, model="flat").run().passed
    disc = AgmonFit(config, model="hyperbolic").run()
    assert disc.metrics["beta_hat"] > 0
    assert disc.experiment_id == "agmon-fit-hyperbolic"


def test_exhaustion_on_the_plane(config):
    report = Exhaustion(config, K=3).run()
    assert report.passed
    norms = report.metrics["section_norms"]
    assert np.all(np.diff(norms) > 0)
    assert max(report.metrics["reproducing_relative_errors"]) < 1e-8


def test_exhaustion_with_one_point(config):
    report = Exhaustion(config, K=1).run()
    assert report.passed
    assert len(report.metrics["points"]) == 1


def test_idempotency_of_the_summed_kernel(config):
    report = Idempotency(config, nodes=24).run()
    assert report.passed
    assert report.metrics["self_adjointness"] < 1e-8


@pytest.mark.slow
def test_invariant_suite(config):
    report = Invariants(config).run()
    failed = [name for name, (value, rel, limit) in report.checks.items()
              if not RELATIONS[rel](value, limit)]
    assert not failed, failed
    assert "disc_equivariance" in report.checks
    assert report.metrics["disc_elements"] > 9
    assert report.passed


@pytest.mark.slow
def test_negative_controls_fail(config):
    config = config.with_overrides(**{"quadrature.torus_nodes": 32})
    radius = identity_only_radius(TorusKernelIdentity(config).build_space())
    identity_only = TorusKernelIdentity(config, N=3, radius=radius, expect_failure=True).run()
    unsigned = TorusKernelIdentity(config, N=3, semicharacter=False, expect_failure=True).run()
    assert identity_only.passed and unsigned.passed
    assert identity_only.residual_max > 1e-3
    assert unsigned.residual_max > 1e-3


@pytest.mark.slow
def test_surjectivity_on_the_torus(config):
    report = Surjectivity(config, N=2).run()
    assert report.passed
    assert report.metrics["d_N"] == 2
    assert report.metrics["condition_number"] < 1e8


@pytest.fixture(scope="session")
def disc_cache_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("disc-cache")


@pytest.fixture
def disc_config(config, disc_cache_dir, monkeypatch):
    """Genus-2 runs share one cache so the large ball is enumerated once"""
    monkeypatch.setenv(CACHE_ENV, str(disc_cache_dir))
    return config.with_overrides(**{"fuchsian.pairs": 4})


@pytest.mark.slow
def test_kernel_identity_on_the_genus_two_surface(disc_config):
    report = FuchsianKernelIdentity(disc_config, N=2).run()
    assert report.experiment_id == "kernel-identity-fuchsian-t2"
    assert report.passed
    assert report.metrics["d_N"] == 3
    assert report.metrics["expected_scale"] == pytest.approx(2 * np.pi / 3)
    assert report.metrics["fitted_scale"] == pytest.approx(2 * np.pi / 3, rel=1e-2)
    assert report.metrics["scale_spread"] < 0.01


@pytest.mark.slow
def test_surjectivity_on_the_genus_two_surface(disc_config):
    report = Surjectivity(disc_config, N=2, model="hyperbolic").run()
    assert report.experiment_id == "surjectivity-fuchsian-t2"
    assert report.passed
    assert report.metrics["d_N"] == 3


@pytest.mark.slow
def test_exhaustion_on_the_disc(disc_config):
    report = Exhaustion(disc_config, model="hyperbolic", K=2).run()
    assert report.passed
    assert len(report.metrics["points"]) == 2
    assert np.all(np.diff(report.metrics["section_norms"]) > 0)
    assert "reproducing_identity" not in report.checks


@pytest.mark.slow
def test_invalid_disc_certificate_records_its_reason(disc_config, monkeypatch):
    config = disc_config.with_overrides(**{
        "fuchsian.certificate": "fitted",
        "fuchsian.min_radius": 7.0,
        "fuchsian.max_radius": 7.5,
    })
    # An Agmon constant far below the growth rate of the group
    monkeypatch.setattr(FuchsianKernelIdentity, "fitted_beta", lambda self: 0.05)
    report = FuchsianKernelIdentity(config, N=2, pairs=2).run()
    assert CERTIFICATE_INVALID in report.flags
    assert report.status == THRESHOLD_STATUS
    assert "does not beat" in report.metrics["reason"]
