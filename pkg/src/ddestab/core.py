"""Domain types and the rotation reduction for x'(t) = lam*x(t) + gam*x(t - tau).

Complex values are plain Python ``complex`` numbers; :func:`as_complex`
validates them (finite, numeric) at the boundaries of the library.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from numbers import Number
from typing import Optional

__all__ = [
    "Status",
    "CaseTag",
    "RegionVariant",
    "DdeProblem",
    "ReducedProblem",
    "StabilityVerdict",
    "RegionCase",
    "as_complex",
    "principal_arg",
    "reduce",
    "crossing_frequency",
    "characteristic_value",
    "region_case",
]


class Status(str, enum.Enum):
    STABLE = "Stable"
    MARGINAL = "Marginal"
    UNSTABLE = "Unstable"


class CaseTag(str, enum.Enum):
    DISC_INTERIOR = "DiscInterior"
    REGION_INTERIOR = "RegionInterior"
    BOUNDARY = "Boundary"
    NECESSARY_FAIL = "NecessaryFail"
    REGION_EXTERIOR = "RegionExterior"
    SUPERCRITICAL_A = "SupercriticalA"


class RegionVariant(str, enum.Enum):
    NEG_A = "NegA"
    ZERO_A = "ZeroA"
    POS_A = "PosA"
    SUPERCRITICAL = "Supercritical"


def as_complex(value, name: str = "value") -> complex:
    """Coerce ``value`` to a finite complex number or raise ``ValueError``."""
    if isinstance(value, (tuple, list)) and len(value) == 2:
        value = complex(float(value[0]), float(value[1]))
    if not isinstance(value, Number):
        raise TypeError(f"{name} must be a number, got {type(value).__name__}")
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{name} must be finite, got {z!r}")
    return z


def _positive_tau(tau) -> float:
    tau = float(tau)
    if not (math.isfinite(tau) and tau > 0):
        raise ValueError(f"tau must be a finite positive number, got {tau!r}")
    return tau


def principal_arg(z: complex) -> float:
    """Argument of ``z`` in (-pi, pi]. Undefined (ValueError) at zero."""
    if z == 0:
        raise ValueError("argument of zero is undefined")
    phi = math.atan2(z.imag, z.real)
    # atan2(-0.0, x<0) gives -pi; the principal branch excludes it.
    if phi == -math.pi:
        phi = math.pi
    return phi


@dataclass(frozen=True)
class DdeProblem:
    """Coefficients of x'(t) = lam*x(t) + gam*x(t - tau)."""

    lam: complex
    gamma: complex
    tau: float

    def __post_init__(self):
        object.__setattr__(self, "lam", as_complex(self.lam, "lam"))
        object.__setattr__(self, "gamma", as_complex(self.gamma, "gamma"))
        object.__setattr__(self, "tau", _positive_tau(self.tau))


@dataclass(frozen=True)
class ReducedProblem:
    """The rotated problem s - a - eta*exp(-s*tau) = 0 (``b`` kept for undoing)."""

    a: float
    eta: complex
    tau: float
    b: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "eta", as_complex(self.eta, "eta"))
        object.__setattr__(self, "tau", _positive_tau(self.tau))
        object.__setattr__(self, "b", float(self.b))


@dataclass(frozen=True)
class StabilityVerdict:
    status: Status
    case_tag: CaseTag
    witness: Optional[complex] = None

    @property
    def is_stable(self) -> bool:
        return self.status is Status.STABLE

    def to_dict(self) -> dict:
        w = self.witness
        return {
            "status": self.status.value,
            "case_tag": self.case_tag.value,
            "witness": None if w is None else {"re": w.real, "im": w.imag},
        }


@dataclass(frozen=True)
class RegionCase:
    variant: RegionVariant
    a: float
    tau: float


def region_case(a: float, tau: float) -> RegionCase:
    a = float(a)
    tau = _positive_tau(tau)
    if a < 0:
        variant = RegionVariant.NEG_A
    elif a == 0:
        variant = RegionVariant.ZERO_A
    elif a * tau <= 1.0:
        variant = RegionVariant.POS_A
    else:
        variant = RegionVariant.SUPERCRITICAL
    return RegionCase(variant, a, tau)


def reduce(problem: DdeProblem) -> ReducedProblem:
    """Rotate the delayed coefficient so the undelayed one becomes real.

    Roots of the reduced equation are the original roots shifted by
    ``-1j*b``; real parts are unchanged.
    """
    a, b = problem.lam.real, problem.lam.imag
    eta = problem.gamma * cmath.exp(-1j * b * problem.tau)
    return ReducedProblem(a=a, eta=eta, tau=problem.tau, b=b)


def crossing_frequency(a: float, eta_mod: float) -> Optional[float]:
    """Frequency at which a root can sit on the imaginary axis, or None.

    A root ``1j*omega`` forces ``omega**2 == eta_mod**2 - a**2``; inside the
    disc ``eta_mod < |a|`` no such root exists for any delay.
    """
    if eta_mod < 0:
        raise ValueError("eta_mod must be non-negative")
    a = abs(float(a))
    if eta_mod < a:
        return None
    # (w - a)(w + a) loses less precision than w*w - a*a near w == a
    return math.sqrt((eta_mod - a) * (eta_mod + a))


def characteristic_value(s, a: float, eta, tau: float) -> complex:
    """Evaluate s - a - eta*exp(-s*tau)."""
    s = complex(s)
    return s - a - complex(eta) * cmath.exp(-s * tau)
