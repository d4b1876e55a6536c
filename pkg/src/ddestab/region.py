"""Stability regions of s - a - eta*exp(-s*tau) = 0 in the eta-plane.

For fixed ``a`` and ``tau`` the open set of stabilising ``eta`` is bounded
by the curve traced by eta(omega) = exp(1j*omega*tau) * (-a + 1j*omega),
the value of ``eta`` that puts a root at ``1j*omega``, together with its
mirror image. Everything here is parametrised by the crossing frequency
``omega = sqrt(|eta|**2 - a**2)`` rather than by ``|eta|``: the curve is
smooth in ``omega`` while ``d omega / d|eta|`` blows up at ``|eta| = |a|``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .core import (
    CaseTag,
    RegionCase,
    RegionVariant,
    StabilityVerdict,
    Status,
    as_complex,
    crossing_frequency,
    principal_arg,
    region_case,
)

__all__ = [
    "TOL_BOUNDARY",
    "BoundaryCurve",
    "Lemma2Kind",
    "Lemma2Classification",
    "delta_gamma_plus",
    "w_extremum",
    "eta_pi_magnitude",
    "boundary_distance",
    "membership",
    "boundary_curve",
    "classify_lemma2",
]

TOL_BOUNDARY = 1e-9


def _bisect(f, lo, hi, xtol=0.0, maxiter=200):
    """Bisection for a sign change of ``f`` on [lo, hi], to full precision by default."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= xtol:
            break
        fmid = f(mid)
        if fmid == 0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _angle_of_omega(omega, a, tau):
    # Continuous argument of exp(1j*omega*tau)*(-a + 1j*omega); works on arrays.
    # For a < 0: omega*tau + arctan(omega/|a|); for a > 0 the second factor
    # sits in the second quadrant, giving pi - arctan(omega/a); for a == 0
    # it is pi/2 for every omega > 0. arctan2 covers all three.
    return omega * tau + np.arctan2(omega, -a)


def _curve_point(omega, a, tau):
    return np.exp(1j * omega * tau) * (-a + 1j * omega)


def delta_gamma_plus(w: float, a: float, tau: float) -> float:
    """Argument increment of the crossing curve at modulus ``w``.

    Equals ``tau*sqrt(w**2 - a**2) + arctan(-sqrt(w**2 - a**2)/a)`` for
    ``a < 0``, the same plus ``pi`` for ``a > 0`` and ``tau*w + pi/2`` for
    ``a == 0``.
    """
    omega = crossing_frequency(a, w)
    if omega is None:
        raise ValueError(f"w={w!r} lies below |a|={abs(a)!r}")
    if a == 0:
        return w * tau + math.pi / 2
    return float(_angle_of_omega(omega, a, tau))


def w_extremum(a: float, tau: float) -> float:
    """Modulus where the increment has its turning point (``a > 0`` only)."""
    if not a > 0:
        raise ValueError("w_extremum requires a > 0")
    return math.sqrt(a / tau)


def _omega_pi(a: float, tau: float) -> float:
    """Crossing frequency at which the boundary reaches the negative real axis."""
    if a * tau > 1:
        raise ValueError(f"no stability region for a={a!r} > 1/tau={1 / tau!r}")
    if a < 0:
        # tau*omega + arctan(omega/|a|) - pi, increasing; at pi/tau it is >= 0
        return _bisect(lambda om: om * tau + math.atan(om / -a) - math.pi, 0.0, math.pi / tau)
    if a == 0:
        return math.pi / (2 * tau)
    # tau*omega - arctan(omega/a): zero at 0, dips below zero until the
    # turning point when a*tau < 1, positive beyond; at (pi/2 + 1)/tau it is >= 1.
    turn_sq = a / tau - a * a
    if turn_sq <= 0:
        return 0.0
    h = lambda om: om * tau - math.atan(om / a)  # noqa: E731
    lo = math.sqrt(turn_sq)
    if not h(lo) < 0:
        # a*tau within rounding of 1: region degenerates to the point -a
        return 0.0
    return _bisect(h, lo, (math.pi / 2 + 1) / tau)


def eta_pi_magnitude(a: float, tau: float) -> float:
    """Outer modulus bound of the stability region (``a <= 1/tau``)."""
    return math.hypot(a, _omega_pi(a, tau))


@dataclass(frozen=True)
class BoundaryCurve:
    """Upper boundary arc sampled in increasing modulus.

    ``angles`` holds the continuous argument of each sample; the lower arc
    is the complex conjugate. ``closed_by_disc_arc`` marks ``a < 0`` where
    the disc of radius ``|a|`` belongs to the region as well.
    """

    points: np.ndarray
    w_values: np.ndarray
    angles: np.ndarray
    case: RegionCase
    closed_by_disc_arc: bool

    @property
    def omegas(self) -> np.ndarray:
        a = self.case.a
        return np.sqrt(np.maximum((self.w_values - abs(a)) * (self.w_values + abs(a)), 0.0))

    def lower(self) -> np.ndarray:
        return np.conj(self.points)


def _invert_angle(targets, a, tau, lo, hi, iters=80):
    """Vectorised bisection for omega in [lo, hi] with angle(omega) == target.

    The angle must be monotone on [lo, hi]; direction is detected from the ends.
    """
    targets = np.asarray(targets, dtype=float)
    increasing = _angle_of_omega(hi, a, tau) >= _angle_of_omega(lo, a, tau)
    lo_arr = np.full_like(targets, lo)
    hi_arr = np.full_like(targets, hi)
    for _ in range(iters):
        mid = 0.5 * (lo_arr + hi_arr)
        below = _angle_of_omega(mid, a, tau) < targets
        move_lo = below if increasing else ~below
        lo_arr = np.where(move_lo, mid, lo_arr)
        hi_arr = np.where(move_lo, hi_arr, mid)
    return 0.5 * (lo_arr + hi_arr)


def boundary_curve(a: float, tau: float, n: int = 200) -> BoundaryCurve:
    """Sample the upper boundary arc with ``n`` points spaced evenly in argument."""
    if n < 2:
        raise ValueError("n must be at least 2")
    case = region_case(a, tau)
    if case.variant is RegionVariant.SUPERCRITICAL:
        raise ValueError(f"no stability region for a={a!r} > 1/tau={1 / tau!r}")
    om_pi = _omega_pi(a, tau)
    if case.variant is RegionVariant.ZERO_A:
        targets = np.linspace(math.pi / 2, math.pi, n)
        omegas = (targets - math.pi / 2) / tau
        omegas[-1] = om_pi
    elif case.variant is RegionVariant.NEG_A:
        targets = np.linspace(0.0, math.pi, n)
        omegas = _invert_angle(targets, a, tau, 0.0, om_pi)
        omegas[0], omegas[-1] = 0.0, om_pi
    elif om_pi == 0.0:
        # a == 1/tau: the closure is the single point -a
        omegas = np.zeros(1)
        targets = np.array([math.pi])
    else:
        om_m = math.sqrt(a / tau - a * a)
        low = float(_angle_of_omega(om_m, a, tau))
        span = math.pi - low
        u = np.linspace(0.0, 2 * span, n)
        first = u <= span
        omegas = np.empty(n)
        targets = np.where(first, math.pi - u, low + (u - span))
        omegas[first] = _invert_angle(targets[first], a, tau, 0.0, om_m)
        omegas[~first] = _invert_angle(targets[~first], a, tau, om_m, om_pi)
        omegas[0], omegas[-1] = 0.0, om_pi
    points = _curve_point(omegas, a, tau)
    w_values = np.hypot(a, omegas)
    angles = _angle_of_omega(omegas, a, tau)
    if case.variant is RegionVariant.ZERO_A:
        angles[0] = math.pi / 2
    return BoundaryCurve(
        points=points,
        w_values=w_values,
        angles=angles,
        case=case,
        closed_by_disc_arc=case.variant is RegionVariant.NEG_A,
    )


def boundary_distance(eta, a: float, tau: float, within: float = 1e-3) -> float:
    """Euclidean distance from ``eta`` to the region boundary.

    Exact (to rounding) when the distance is below ``within``; otherwise
    some value ``>= within`` is returned, possibly ``inf``. Only the arc
    segment whose moduli lie within ``within`` of ``|eta|`` can be closer
    than ``within``, so the search stays local.
    """
    eta = as_complex(eta, "eta")
    if a * tau > 1:
        return math.inf
    om_pi = _omega_pi(a, tau)
    # the arcs are mirror images; the upper one is nearest to points with Im >= 0
    p = eta.conjugate() if eta.imag < 0 else eta
    w = abs(p)
    aa = abs(a)
    w_lo = max(w - within, aa)
    w_hi = min(w + within, math.hypot(a, om_pi))
    if w_lo > w_hi:
        return math.inf
    om_lo = math.sqrt((w_lo - aa) * (w_lo + aa))
    om_hi = math.sqrt(max((w_hi - aa) * (w_hi + aa), 0.0))
    om_hi = min(max(om_hi, om_lo), om_pi)

    def dist(om):
        return abs(p - complex(_curve_point(om, a, tau)))

    if om_hi - om_lo <= 1e-300:
        best = dist(om_lo)
    else:
        grid = np.linspace(om_lo, om_hi, 33)
        d = np.abs(p - _curve_point(grid, a, tau))
        k = int(np.argmin(d))
        best = float(d[k])
        lo_b, hi_b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
        if hi_b > lo_b:
            res = minimize_scalar(dist, bounds=(lo_b, hi_b), method="bounded",
                                  options={"xatol": 1e-14 * max(1.0, hi_b)})
            best = min(best, float(res.fun))
    return best if best < within else max(best, within)


def membership(eta, a: float, tau: float, tol: float = TOL_BOUNDARY) -> StabilityVerdict:
    """Decide whether every root of s - a - eta*exp(-s*tau) has Re s < 0.

    Points within ``tol`` of the region boundary are reported Marginal; pass
    ``tol=0`` for the bare strict inequalities.
    """
    eta = as_complex(eta, "eta")
    case = region_case(a, tau)
    a, tau = case.a, case.tau
    w = abs(eta)
    nec = eta.real + a

    if case.variant is RegionVariant.SUPERCRITICAL:
        # s - a - eta*exp(-s*tau) has a root in Re s > 0 for every eta
        return StabilityVerdict(Status.UNSTABLE, CaseTag.SUPERCRITICAL_A, eta)
    if eta == 0:
        if a < 0:
            return StabilityVerdict(Status.STABLE, CaseTag.DISC_INTERIOR)
        if a == 0:
            return StabilityVerdict(Status.MARGINAL, CaseTag.BOUNDARY, 0j)
        return StabilityVerdict(Status.UNSTABLE, CaseTag.NECESSARY_FAIL, eta)

    if tol > 0 and boundary_distance(eta, a, tau, within=tol) <= tol:
        omega = crossing_frequency(a, w) or 0.0
        return StabilityVerdict(Status.MARGINAL, CaseTag.BOUNDARY, complex(0.0, omega))

    if a < 0 and w < -a:
        return StabilityVerdict(Status.STABLE, CaseTag.DISC_INTERIOR)
    if nec > 0:
        return StabilityVerdict(Status.UNSTABLE, CaseTag.NECESSARY_FAIL, eta)
    if nec == 0:
        if a < 0 and w == -a:
            # eta == -a puts a root at the origin
            return StabilityVerdict(Status.MARGINAL, CaseTag.BOUNDARY, 0j)
        return StabilityVerdict(Status.UNSTABLE, CaseTag.REGION_EXTERIOR, eta)
    if a < 0 and w == -a:
        # on the disc edge but away from -a: no imaginary-axis root exists
        return StabilityVerdict(Status.STABLE, CaseTag.DISC_INTERIOR)

    om_pi = _omega_pi(a, tau)
    if w >= math.hypot(a, om_pi):
        return StabilityVerdict(Status.UNSTABLE, CaseTag.REGION_EXTERIOR, eta)
    omega = crossing_frequency(a, w)
    if a == 0:
        bound = tau * w + math.pi / 2
    else:
        bound = float(_angle_of_omega(omega, a, tau))
    if abs(principal_arg(eta)) > bound:
        return StabilityVerdict(Status.STABLE, CaseTag.REGION_INTERIOR)
    return StabilityVerdict(Status.UNSTABLE, CaseTag.REGION_EXTERIOR, eta)


class Lemma2Kind(str, enum.Enum):
    FULL_RAY = "FullRay"
    TAIL_RAY = "TailRay"
    EMPTY = "Empty"


@dataclass(frozen=True)
class Lemma2Classification:
    """Shape of {r >= 0 : r/(r**2 + 1) <= arctan(r) + beta}."""

    beta: float
    kind: Lemma2Kind
    r0: Optional[float] = None

    def to_dict(self) -> dict:
        return {"beta": self.beta, "kind": self.kind.value, "r0": self.r0}


def _phi(r, beta):
    return math.atan(r) + beta - r / (r * r + 1)


def classify_lemma2(beta: float) -> Lemma2Classification:
    """Classify the solution set of r/(r**2+1) <= arctan(r) + beta.

    ``phi(r) = arctan(r) + beta - r/(r**2+1)`` is strictly increasing from
    ``beta`` towards ``beta + pi/2``, so the set is all of [0, inf), a tail
    [r0, inf) or empty.
    """
    beta = float(beta)
    if not math.isfinite(beta):
        raise ValueError("beta must be finite")
    if beta >= 0:
        return Lemma2Classification(beta, Lemma2Kind.FULL_RAY, None)
    if beta <= -math.pi / 2:
        return Lemma2Classification(beta, Lemma2Kind.EMPTY, None)
    hi = 1.0
    while _phi(hi, beta) <= 0:
        hi *= 2.0
        if hi > 1e300:
            # beta is within rounding of -pi/2: phi never turns positive in floats
            return Lemma2Classification(beta, Lemma2Kind.EMPTY, None)
    r0 = _bisect(lambda r: _phi(r, beta), 0.0, hi)
    return Lemma2Classification(beta, Lemma2Kind.TAIL_RAY, r0)
