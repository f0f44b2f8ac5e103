"""Shared plumbing for experiments: reports, model construction and cached artifacts."""
from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field

import numpy as np

from objects.sections import PoincareMonomialFamily, ThetaFamily
from objects.spaces import FlatModel, HyperbolicModel
from utils.agmon import disc_agmon_fit
from utils.cache import (
    canonical_json,
    group_cache_key,
    load_basis,
    load_group,
    save_basis,
    save_group,
)
from utils.certificates import minimal_radius
from utils.errors import CacheIntegrityError
from utils.logger import log
from utils.quadrature import domain_quadrature
from utils.quotient import build_basis

CERTIFICATE_INVALID = "certificate_invalid"
TOLERANCE_NOT_MET = "tolerance_not_met"
THRESHOLD_STATUS = "N below operational threshold"

RELATIONS = {
    "<=": lambda value, limit: value <= limit,
    ">=": lambda value, limit: value >= limit,
    "<": lambda value, limit: value < limit,
    ">": lambda value, limit: value > limit,
    "==": lambda value, limit: value == limit,
}


def _plain(value):
    """JSON-ready copy with numpy scalars and arrays turned into Python values"""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    return value


def evaluate_payload(payload):
    """Pass/fail from the recorded numbers alone"""
    if CERTIFICATE_INVALID in payload["flags"]:
        return False
    ok = all(RELATIONS[rel](value, limit) for value, rel, limit in payload["checks"].values())
    residuals = payload["residuals"]
    if residuals and payload["budget"]:
        ok = ok and max(residuals) <= sum(payload["budget"].values())
    return (not ok) if payload["expect_failure"] else ok


@dataclass
class VerificationReport:
    experiment_id: str
    parameters: dict
    residuals: list = field(default_factory=list)
    budget: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)
    expect_failure: bool = False
    runtime: float = 0.0

    def check(self, name, value, relation, limit):
        self.checks[name] = [value, relation, limit]
        return self

    def flag(self, name):
        if name not in self.flags:
            self.flags.append(name)
        return self

    @property
    def residual_max(self):
        return float(max(self.residuals)) if self.residuals else 0.0

    @property
    def residual_median(self):
        return float(np.median(self.residuals)) if self.residuals else 0.0

    @property
    def budget_total(self):
        return float(sum(self.budget.values()))

    @property
    def status(self):
        if CERTIFICATE_INVALID in self.flags:
            return THRESHOLD_STATUS
        return "pass" if self.passed else "fail"

    @property
    def passed(self):
        return evaluate_payload(self.payload())

    def payload(self):
        return _plain({
            "experiment_id": self.experiment_id,
            "parameters": self.parameters,
            "residuals": self.residuals,
            "residual_stats": {"max": self.residual_max, "median": self.residual_median},
            "budget": self.budget,
            "checks": self.checks,
            "flags": sorted(self.flags),
            "metrics": self.metrics,
            "expect_failure": self.expect_failure,
        })

    def to_json(self, threads=1):
        """Payload and run metadata; only `meta` changes between identical runs"""
        payload = self.payload()
        payload["passed"] = evaluate_payload(payload)
        payload["status"] = self.status
        meta = {
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
            "runtime": round(self.runtime, 3),
            "threads": int(threads),
        }
        return {"payload": payload, "meta": meta}


class Experiment:
    """Base class: subclasses set class-level parameters and implement construct()"""
    experiment_id = None
    model = "flat"

    def __init__(self, config, threads=1, **kwargs):
        self.config = config
        self.threads = threads
        for key, value in kwargs.items():
            if not hasattr(self, key):
                raise AttributeError(f"{type(self).__name__} has no parameter {key!r}")
            setattr(self, key, value)
        self.rng = np.random.default_rng(config.seed)

    def setup(self):
        self.space = self.build_space()

    def construct(self):
        raise NotImplementedError

    def run(self):
        start = time.perf_counter()
        self.setup()
        report = self.construct()
        report.runtime = time.perf_counter() - start
        log.info("%s: %s (max residual %.2e)", report.experiment_id, report.status,
                 report.residual_max)
        return report

    def build_space(self, model=None, **kwargs):
        model = model or self.model
        if model == "flat":
            return FlatModel(self.config.tau, **kwargs)
        fuchsian = self.config["fuchsian"]
        return HyperbolicModel(
            word_cap=self.config["caps"]["word_length"],
            sample_radius=fuchsian["sample_radius"],
        )

    def enumerate(self, space, radius):
        """Group ball of the given radius, through the on-disk cache"""
        caps = dict(self.config["caps"])
        path = self.config.cache_dir / group_cache_key(space, radius, caps)
        if path.exists():
            try:
                return load_group(path, space)
            except CacheIntegrityError as exc:
                log.warning("ignoring cache %s: %s", path, exc)
        enumeration = space.enumerate(radius, cap=caps["elements"])
        save_group(enumeration, path, caps)
        return enumeration

    def disc_radius(self, space, t, stats, delta):
        """Radius meeting the configured tail target, clipped to [min_radius, max_radius]"""
        fuchsian = self.config["fuchsian"]
        kwargs = dict(stats=stats, delta=delta, shell=self.config["summation"]["shell"])
        if fuchsian["certificate"] == "fitted":
            kwargs.update(beta=self.fitted_beta(), mode="fitted")
        radius = minimal_radius(space, t, fuchsian["tail_tolerance"],
                                max_radius=fuchsian["max_radius"], **kwargs)
        if radius is None:
            return fuchsian["max_radius"]
        return float(np.clip(radius, fuchsian["min_radius"], fuchsian["max_radius"]))

    def disc_enumeration(self, space, t, points):
        """(GroupStats, enumeration) for weight t, sized by the tail target at these points

        Growth constants come from the largest ball the run may use.
        """
        full = self.enumerate(space, self.config["fuchsian"]["max_radius"])
        stats = space.group.stats(full)
        delta = 2 * float(np.max(space.distance(space.basepoint, np.asarray(points))))
        radius = self.disc_radius(space, t, stats, delta)
        return stats, full.restrict(radius)

    def fitted_beta(self):
        agmon = self.config["agmon"]
        return 0.9 * disc_agmon_fit(agmon["disc_t"], agmon["distances"])["beta_hat"]

    def theta_basis(self, space, N, nodes=None, refine=True):
        nodes = nodes or self.config["quadrature"]["torus_nodes"]
        family = ThetaFamily(N, space.tau)
        quad = domain_quadrature(space, nodes)
        return self._cached_basis(
            family, quad, self.config["torus"]["rank_rtol"],
            refined=domain_quadrature(space, 2 * nodes) if refine else None,
        )

    def poincare_basis(self, space, t, enumeration, nodes=None):
        nodes = nodes or self.config["quadrature"]["octagon_nodes"]
        family = PoincareMonomialFamily(space, t, enumeration)
        quad = domain_quadrature(space, nodes)
        return self._cached_basis(family, quad, self.config["fuchsian"]["rank_rtol"])

    def _cached_basis(self, family, quad, rtol, refined=None):
        key = canonical_json({"family": family.describe(), "quadrature": quad.description,
                              "rtol": rtol, "refined": refined is not None})
        name = f"basis-{family.kind}-{hashlib.sha256(key.encode()).hexdigest()[:16]}.npz"
        path = self.config.cache_dir / name
        if path.exists():
            try:
                return load_basis(path, family=family)
            except CacheIntegrityError as exc:
                log.warning("ignoring cache %s: %s", path, exc)
        basis = build_basis(family, quad, rtol=rtol, refined=refined, threads=self.threads,
                            flag_ratio=self.config["quadrature"]["gram_flag_ratio"])
        save_basis(basis, path)
        return basis
