"""Value types shared by the kernel, summation and verification layers."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class KernelValue:
    """A kernel evaluated in a global frame

    density is B(z, conj(w)) in the frame named by `frame`; unitary is the
    same value multiplied by e^{-N phi(z)/2} e^{-N phi(w)/2}, so that
    pointwise_norm = |unitary| does not depend on the frame.
    """
    density: complex | np.ndarray
    unitary: complex | np.ndarray
    frame: str

    @property
    def pointwise_norm(self):
        return np.abs(self.unitary)

    def scaled(self, factor):
        return KernelValue(self.density * factor, self.unitary * factor, self.frame)


@dataclass(frozen=True)
class LiftedPoint:
    """A point of the cover together with an angle on the circle fibre"""
    base: complex
    theta: float = 0.0

    def __post_init__(self):
        # Angles live in [0, 2 pi)
        object.__setattr__(self, "theta", float(np.mod(self.theta, TWO_PI)))
        object.__setattr__(self, "base", complex(self.base))

    def rotated(self, alpha):
        return LiftedPoint(self.base, self.theta + alpha)


@dataclass
class TruncationCertificate:
    """Upper bound on the part of a Gamma-sum left out by a radius-R truncation

    method is "gaussian-flat" or "agmon-geometric"; `valid` is False when
    the decay rate does not beat the group growth (N below the operational
    threshold) and `reason` says why.
    """
    radius: float
    elements_used: int
    tail_bound: float
    method: str
    valid: bool = True
    reason: str = ""
    tolerance: float | None = None
    heuristic: bool = False
    details: dict = field(default_factory=dict)

    @property
    def tolerance_met(self):
        if not self.valid:
            return False
        if self.tolerance is None:
            return True
        return self.tail_bound <= self.tolerance

    def with_elements(self, count):
        self.elements_used = int(count)
        return self

    def to_dict(self):
        return {
            "radius": float(self.radius),
            "elements_used": int(self.elements_used),
            "tail_bound": float(self.tail_bound),
            "method": self.method,
            "valid": bool(self.valid),
            "reason": self.reason,
            "heuristic": bool(self.heuristic),
            "tolerance_met": bool(self.tolerance_met),
        }


@dataclass(frozen=True)
class DecayBound:
    """Majorant |u(z)| <= amplitude * profile(distance(z, center))

    kind "gaussian": profile(d) = exp(-rate d^2)   (flat peak sections)
    kind "exponential": profile(d) = exp(-rate d)  (disc envelopes and Agmon decay)
    """
    kind: str
    amplitude: float
    rate: float
    center: complex = 0j
    heuristic: bool = False
