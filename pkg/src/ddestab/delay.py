"""Critical delay: the supremum of tau for which s - a - eta*exp(-s*tau) is stable."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from .core import as_complex, crossing_frequency, principal_arg
from .region import membership

__all__ = ["DelayKind", "CriticalDelay", "critical_delay", "critical_delay_bisect"]


class DelayKind(str, enum.Enum):
    ALWAYS_STABLE = "AlwaysStable"
    NEVER_STABLE = "NeverStable"
    FINITE = "Finite"


@dataclass(frozen=True)
class CriticalDelay:
    kind: DelayKind
    tau_star: Optional[float] = None
    crossing_omega: Optional[float] = None
    note: str = ""

    def to_dict(self) -> dict:
        tau = self.tau_star
        if self.kind is DelayKind.ALWAYS_STABLE:
            tau = math.inf
        elif self.kind is DelayKind.NEVER_STABLE:
            tau = 0.0
        return {
            "kind": self.kind.value,
            "tau_star": tau,
            "omega": self.crossing_omega,
            "note": self.note,
        }


def _stable(eta, a, tau):
    return membership(eta, a, tau, tol=0.0).is_stable


def critical_delay_bisect(a: float, eta, tau_hi: float, rel_tol: float = 1e-15) -> float:
    """Bisect the stable/unstable switch of the strict membership test on (0, tau_hi].

    Stability is monotone in the delay (the stable set only shrinks), so the
    predicate flips exactly once. ``tau_hi`` must be unstable.
    """
    eta = as_complex(eta, "eta")
    if _stable(eta, a, tau_hi):
        raise ValueError(f"tau_hi={tau_hi!r} is still stable")
    lo = tau_hi
    while not _stable(eta, a, lo):
        lo *= 0.5
        if lo < 1e-300:
            raise ValueError("no stable delay found")
    hi = tau_hi
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _stable(eta, a, mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def critical_delay(a: float, eta) -> CriticalDelay:
    """Largest tau* such that the reduced equation is stable for all 0 < tau < tau*.

    Closed forms for ``a <= 0``; for ``a > 0`` the membership predicate is
    bisected on (0, 1/a], beyond which nothing is stable.
    """
    eta = as_complex(eta, "eta")
    a = float(a)
    w = abs(eta)
    nec = eta.real + a

    if a < 0 and (w < -a or (w == -a and eta != -a)):
        # no imaginary-axis root can appear for any delay
        return CriticalDelay(DelayKind.ALWAYS_STABLE)
    if eta == 0:
        # a == 0: root at the origin for every tau; a > 0: root at a
        return CriticalDelay(DelayKind.NEVER_STABLE, note="eta == 0 with a >= 0")
    if nec >= 0:
        note = "root on the imaginary axis as tau -> 0" if nec == 0 else "root in Re s > 0 as tau -> 0"
        return CriticalDelay(DelayKind.NEVER_STABLE, note=note)

    omega = crossing_frequency(a, w)
    arg = abs(principal_arg(eta))
    if a == 0:
        return CriticalDelay(DelayKind.FINITE, (arg - math.pi / 2) / w, w)
    if a < 0:
        tau_star = (math.atan(omega / a) + arg) / omega
        return CriticalDelay(DelayKind.FINITE, tau_star, omega)

    tau_hi = 1.0 / a
    if _stable(eta, a, tau_hi):
        # cannot happen: the region at a == 1/tau is empty
        raise AssertionError("stable at tau = 1/a")
    tau_star = critical_delay_bisect(a, eta, tau_hi)
    return CriticalDelay(DelayKind.FINITE, tau_star, omega)
