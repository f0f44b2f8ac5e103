"""Command-line entry point: `poincare-kernels <subcommand> [options]`."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from joblib import Parallel, delayed

from experiments.agmon import AgmonFit, DoublingTest
from experiments.exhaustion import Exhaustion
from experiments.exports import GroupCensus, KernelGrid
from experiments.idempotency import Idempotency
from experiments.invariants import Invariants
from experiments.kernel_identity import (
    FuchsianKernelIdentity,
    TorusKernelIdentity,
    identity_only_radius,
)
from experiments.surjectivity import Surjectivity
from objects.spaces import FlatModel
from runner.reports import (
    EXIT_CONFIG,
    exit_status,
    write_kernel_grid,
    write_report,
    write_summary,
)
from utils.config import load_config
from utils.errors import ConfigError, ResourceError
from utils.logger import log, set_level
from utils.plotting import plot_group_growth, plot_kernel_grid

__all__ = ["build_parser", "torus_suite", "fuchsian_suite", "run_suite", "main"]

SUBCOMMANDS = ("verify-torus", "verify-fuchsian", "agmon-fit", "exhaustion", "enumerate",
               "kernel-grid")

# --n feeds a different list per subcommand
N_TARGETS = {
    "verify-torus": "torus.N",
    "verify-fuchsian": "fuchsian.N",
    "exhaustion": "exhaustion.N",
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None,
                        help="YAML file merged over the defaults in custom_config.yml")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", type=Path, default=None, help="Report directory")
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--n", type=int, nargs="+", default=None,
                        help="Line bundle powers (weights t on the disc)")
    common.add_argument("--tolerance", type=float, default=None,
                        help="Tail tolerance for the truncation certificate")
    common.add_argument("--beta", type=float, default=None, help="Agmon constant for certificates")
    common.add_argument("--model", choices=("flat", "hyperbolic"), default=None)
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true")
    verbosity.add_argument("--quiet", action="store_true")

    # Only the subcommands that truncate a group ball take a fixed radius
    radius_option = argparse.ArgumentParser(add_help=False)
    radius_option.add_argument("--radius", type=float, default=None,
                               help="Fixed truncation radius")

    parser = argparse.ArgumentParser(
        prog="poincare-kernels",
        description="Quotient Bergman kernels as Poincare series over deck groups.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    torus = subparsers.add_parser("verify-torus", parents=[common, radius_option],
                                  help="Kernel identity, idempotency and surjectivity on the torus")
    torus.add_argument("--full", action="store_true",
                       help="Also run the invariant suite and the negative controls")
    subparsers.add_parser("verify-fuchsian", parents=[common, radius_option],
                          help="Two-pipeline identity and surjectivity on the genus-2 surface")
    subparsers.add_parser("agmon-fit", parents=[common],
                          help="Agmon constant fits and the truncation doubling test")
    subparsers.add_parser("exhaustion", parents=[common],
                          help="Growth along a divergent orbit and the L2 reproducing identity")
    subparsers.add_parser("enumerate", parents=[common, radius_option], help="Build a group cache")
    grid = subparsers.add_parser("kernel-grid", parents=[common, radius_option],
                                 help="CSV (and PNG) of the summed kernel over the domain")
    grid.add_argument("--grid", type=int, default=None, help="Grid points per side")
    return parser


def config_overrides(args):
    overrides = {
        "seed": args.seed,
        "output.directory": str(args.out) if args.out is not None else None,
        "output.threads": args.threads,
        "summation.beta": args.beta,
    }
    if args.n is not None:
        if args.command == "agmon-fit":
            key = "agmon.disc_t" if args.model == "hyperbolic" else "agmon.flat_N"
            overrides[key] = args.n
        elif args.command == "exhaustion":
            overrides["exhaustion.N"] = args.n[0]
        elif args.command in N_TARGETS:
            overrides[N_TARGETS[args.command]] = args.n
    radius = getattr(args, "radius", None)
    if radius is not None:
        if args.command == "verify-fuchsian" or (
            args.command == "kernel-grid" and args.model == "hyperbolic"
        ):
            overrides["fuchsian.min_radius"] = radius
            overrides["fuchsian.max_radius"] = radius
        elif args.command in ("verify-torus", "kernel-grid"):
            overrides["torus.radius"] = radius
    if args.tolerance is not None:
        section = "fuchsian" if args.command == "verify-fuchsian" else "torus"
        overrides[f"{section}.tail_tolerance"] = args.tolerance
    return overrides


def torus_suite(config, full=False):
    """Experiments of `verify-torus`; with full, the invariants and the controls that must fail"""
    suite = [TorusKernelIdentity(config, N=N) for N in config["torus"]["N"]]
    suite.append(Idempotency(config))
    suite += [Surjectivity(config, N=N) for N in config["verification"]["surjectivity_N"]]
    if full:
        radius = identity_only_radius(FlatModel(config.tau))
        threshold = config["verification"]["control_threshold"]
        suite += [
            Invariants(config),
            Idempotency(config, source="basis"),
            DoublingTest(config),
            TorusKernelIdentity(config, N=3, radius=radius, expect_failure=True,
                                experiment_id="control-identity-only"),
            TorusKernelIdentity(config, N=3, semicharacter=False, expect_failure=True,
                                experiment_id="control-no-semicharacter"),
            Idempotency(config, radius=radius, tolerance=threshold, expect_failure=True,
                        experiment_id="control-idempotency-identity-only"),
        ]
    return suite


def fuchsian_suite(config):
    suite = [FuchsianKernelIdentity(config, N=t) for t in config["fuchsian"]["N"]]
    suite += [Surjectivity(config, N=t, model="hyperbolic") for t in config["fuchsian"]["N"]]
    return suite


def _run(experiment):
    return experiment.run()


def run_suite(experiments, threads=1):
    """Run experiments on a thread pool; reports come back in submission order"""
    if threads > 1 and len(experiments) > 1:
        for experiment in experiments:
            experiment.threads = 1
        return Parallel(n_jobs=threads, prefer="threads")(
            delayed(_run)(experiment) for experiment in experiments
        )
    for experiment in experiments:
        experiment.threads = threads
    return [_run(experiment) for experiment in experiments]


def _experiments(args, config):
    model = args.model or "flat"
    if args.command == "verify-torus":
        return torus_suite(config, full=args.full)
    if args.command == "verify-fuchsian":
        return fuchsian_suite(config)
    if args.command == "agmon-fit":
        suite = [AgmonFit(config, model="flat"), AgmonFit(config, model="hyperbolic")]
        if args.model is not None:
            suite = [AgmonFit(config, model=args.model)]
        if model == "flat":
            suite.append(DoublingTest(config))
        return suite
    if args.command == "exhaustion":
        return [Exhaustion(config, model=model)]
    if args.command == "enumerate":
        return [GroupCensus(config, model=model, radius=args.radius)]
    N = args.n[0] if args.n else 2
    return [KernelGrid(config, model=model, N=N, grid=args.grid)]


def _write_artifacts(experiments, reports, config):
    if not config["output"]["plots"]:
        return
    for experiment, report in zip(experiments, reports):
        if isinstance(experiment, KernelGrid):
            plot_kernel_grid(
                experiment.points, abs(experiment.values), experiment.space.domain,
                config.out / f"{report.experiment_id}.png",
                title=f"|Pi(z, w0)|, N={experiment.N}",
                disc_circle=experiment.space.kind == "hyperbolic",
            )
        elif isinstance(experiment, GroupCensus) and experiment.stats is not None:
            plot_group_growth(experiment.stats, config.out / f"{report.experiment_id}.png",
                              title=experiment.space.kind)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        set_level("DEBUG")
    elif args.quiet:
        set_level("WARNING")

    try:
        config = load_config(args.config, **config_overrides(args))
        experiments = _experiments(args, config)
    except (ConfigError, AttributeError) as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_CONFIG

    try:
        reports = run_suite(experiments, config.threads)
    except ResourceError as exc:
        log.error("%s (%d elements found)", exc, exc.partial_count)
        return EXIT_CONFIG

    for report in reports:
        write_report(report, config.out, config.threads)
    for experiment, report in zip(experiments, reports):
        if isinstance(experiment, KernelGrid):
            write_kernel_grid(experiment.rows(), config.out / f"{report.experiment_id}.csv")
    _write_artifacts(experiments, reports, config)
    summary = write_summary(reports, config.out)

    status = exit_status(reports)
    failed = [r.experiment_id for r in reports if not r.passed]
    log.info("%d reports written, summary in %s", len(reports), summary)
    if failed:
        log.warning("not passing: %s", ", ".join(failed))
    return status


if __name__ == "__main__":
    sys.exit(main())
