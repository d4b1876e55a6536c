"""Independent root location for s - a - eta*exp(-s*tau) = 0.

Nothing here consults the region formulas: roots are counted with the
argument principle on a half-disc contour and located with Newton's method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import lambertw

from .core import as_complex

__all__ = [
    "ContourGrazing",
    "RootReport",
    "winding_number",
    "count_rhp_roots",
    "count_rhp_roots_safe",
    "newton_refine",
    "rightmost_roots",
]

GRAZE_TOL = 1e-8
_MAX_PHASE_STEP = math.pi / 4


class ContourGrazing(ArithmeticError):
    """A characteristic root lies (numerically) on the counting contour."""

    def __init__(self, min_abs, margin):
        super().__init__(f"|f| fell to {min_abs:.3g} on the contour (margin={margin!r})")
        self.min_abs = min_abs
        self.margin = margin


def _f(s, a, eta, tau):
    return s - a - eta * np.exp(-s * tau)


def _fprime(s, a, eta, tau):
    return 1 + tau * eta * np.exp(-s * tau)


def _contour_radius(a, eta, tau, margin):
    # a root with Re s >= -margin has |s - a| = |eta| exp(-Re(s) tau) <= |eta| exp(margin tau)
    return abs(a) + abs(eta) * math.exp(max(margin, 0.0) * tau) + 1.0 + abs(margin)


def _phase_increments(path, speed, f, lip, n0, max_rounds=64):
    """Accumulated arg change of f along path(t), t in [0, 1], refined adaptively.

    A segment is split while its phase jump exceeds ``_MAX_PHASE_STEP`` or
    while ``lip * length`` is not below half of the smaller endpoint modulus.
    ``lip`` bounds |f'| on the contour, so the second test guarantees f stays
    in a disc excluding 0 and no full turn can hide between two samples.
    Returns (total phase change, min |f| seen).
    """
    t = np.linspace(0.0, 1.0, n0)
    vals = f(path(t))
    for _ in range(max_rounds):
        with np.errstate(divide="ignore", invalid="ignore"):
            steps = np.angle(vals[1:] / vals[:-1])
        mags = np.abs(vals)
        if mags.min() < GRAZE_TOL:
            break
        length = speed * np.diff(t)
        bad = (np.abs(steps) > _MAX_PHASE_STEP) | (lip * length >= 0.5 * np.minimum(mags[1:], mags[:-1]))
        if not bad.any():
            break
        mids = 0.5 * (t[:-1][bad] + t[1:][bad])
        t_new = np.concatenate([t, mids])
        order = np.argsort(t_new, kind="stable")
        t = t_new[order]
        vals = np.concatenate([vals, f(path(mids))])[order]
    with np.errstate(divide="ignore", invalid="ignore"):
        steps = np.angle(vals[1:] / vals[:-1])
    return float(steps.sum()), float(np.abs(vals).min())


def winding_number(a: float, eta, tau: float, margin: float = 0.0) -> float:
    """Raw (unrounded) winding number of f around 0 on the half-disc contour.

    The contour is the boundary of {Re s >= -margin, |s + margin| <= R},
    traversed counter-clockwise, with R large enough to enclose every root
    with Re s >= -margin.
    """
    eta = as_complex(eta, "eta")
    a, tau, margin = float(a), float(tau), float(margin)
    R = _contour_radius(a, eta, tau, margin)
    c = -margin
    f = lambda s: _f(s, a, eta, tau)  # noqa: E731

    arc = lambda t: c + R * np.exp(1j * (-math.pi / 2 + math.pi * t))  # noqa: E731
    line = lambda t: c + 1j * R * (1 - 2 * t)  # noqa: E731
    # roughly R*tau rad of oscillation along the line from the exponential
    n_line = int(min(max(64, 16 * R * (tau + 1)), 200_000))
    n_arc = int(min(max(64, 8 * R * (tau + 1)), 200_000))

    # |f'(s)| = |1 + tau*eta*exp(-s*tau)| and |exp(-s*tau)| <= exp(margin*tau) on the contour
    lip = 1.0 + tau * abs(eta) * math.exp(margin * tau)
    total = 0.0
    min_abs = math.inf
    for path, speed, n0 in ((arc, math.pi * R, n_arc), (line, 2 * R, n_line)):
        dphi, m = _phase_increments(path, speed, f, lip, n0)
        total += dphi
        min_abs = min(min_abs, m)
    if min_abs < GRAZE_TOL:
        raise ContourGrazing(min_abs, margin)
    return total / (2 * math.pi)


def count_rhp_roots(a: float, eta, tau: float, margin: float = 0.0) -> int:
    """Number of characteristic roots with Re s > -margin.

    Raises :class:`ContourGrazing` when a root sits on Re s = -margin.
    """
    wn = winding_number(a, eta, tau, margin)
    n = round(wn)
    if abs(wn - n) > 1e-3:
        raise ArithmeticError(f"winding number {wn!r} is not close to an integer")
    return int(n)


def count_rhp_roots_safe(a: float, eta, tau: float, margin: float = 0.0, shift: float = 1e-6):
    """Like :func:`count_rhp_roots` but retries with ``margin -+ shift`` on grazing.

    Returns ``(count, margin_used)``. The retry with the smaller margin is
    tried first, so a root exactly on the axis is *not* counted; a second
    grazing failure propagates.
    """
    try:
        return count_rhp_roots(a, eta, tau, margin), margin
    except ContourGrazing:
        pass
    try:
        return count_rhp_roots(a, eta, tau, margin - shift), margin - shift
    except ContourGrazing:
        return count_rhp_roots(a, eta, tau, margin + shift), margin + shift


def newton_refine(seeds, a, eta, tau, maxiter=60, rtol=1e-12):
    """Vectorised Newton iteration on all seeds.

    Returns (roots, converged mask, residuals).
    """
    s = np.array(seeds, dtype=complex).ravel()
    active = np.ones(s.shape, dtype=bool)
    for _ in range(maxiter):
        if not active.any():
            break
        sa = s[active]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            fv = _f(sa, a, eta, tau)
            step = fv / _fprime(sa, a, eta, tau)
        done = np.abs(fv) < rtol * (1 + np.abs(sa))
        sa = np.where(done, sa, sa - step)
        s[active] = sa
        idx = np.flatnonzero(active)
        active[idx[done]] = False
        # runaway seeds (to the far left the exponential explodes)
        bad = ~np.isfinite(s) | (np.abs(s) > 1e8)
        active &= ~bad
        s[bad] = np.nan
    with np.errstate(invalid="ignore", over="ignore"):
        res = np.abs(_f(s, a, eta, tau))
    ok = np.isfinite(s) & (res <= 1e-9 * (1 + np.abs(s)))
    return s, ok, res


@dataclass(frozen=True)
class RootReport:
    rhp_count: int
    roots: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    contour_radius: float = 0.0
    margin: float = 0.0

    @property
    def rightmost(self):
        return self.roots[0] if self.roots else None

    def to_dict(self) -> dict:
        return {
            "rhp_count": self.rhp_count,
            "roots": [{"re": r.real, "im": r.imag} for r in self.roots],
            "residuals": list(self.residuals),
            "contour_radius": self.contour_radius,
            "margin": self.margin,
        }


def _seeds(a, eta, tau, margin):
    R = _contour_radius(a, eta, tau, margin)
    seeds = [a + eta]
    wsq = abs(eta) ** 2 - a * a
    if wsq >= 0:
        om = math.sqrt(wsq)
        seeds += [1j * om, -1j * om]
    # principal few Lambert-W branches: s = a + W_k(eta*tau*exp(-a*tau)) / tau
    if eta != 0:
        arg = eta * tau * np.exp(-a * tau)
        for k in range(-3, 4):
            w = complex(lambertw(arg, k))
            if np.isfinite(w):
                seeds.append(a + w / tau)
    re = np.linspace(-margin - 1.0, R, 12)
    ny = int(min(max(24, 4 * R * tau), 400))
    im = np.linspace(-R, R, ny)
    grid = (re[:, None] + 1j * im[None, :]).ravel()
    return np.concatenate([np.asarray(seeds, dtype=complex), grid])


def _dedupe(roots, dist=1e-6):
    out = []
    for r in roots:
        if all(abs(r - q) > dist for q in out):
            out.append(r)
    return out


def rightmost_roots(a: float, eta, tau: float, k: int = 1, margin: float = 0.5,
                    count: bool = True) -> RootReport:
    """Up to ``k`` characteristic roots with the largest real parts.

    Newton is seeded from the tau -> 0 limit root ``a + eta``, the crossing
    frequencies, a few Lambert-W branches and a grid over the window
    Re s >= -margin - 1 of the counting half-disc. Results are deduplicated
    and sorted by real part (then imaginary part) descending.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    eta = as_complex(eta, "eta")
    a, tau = float(a), float(tau)
    seeds = _seeds(a, eta, tau, margin)
    s, ok, res = newton_refine(seeds, a, eta, tau)
    found = s[ok]
    # deterministic order before dedupe: round to the dedupe scale then sort
    order = np.lexsort((-np.round(found.imag, 9), -np.round(found.real, 9)))
    roots = _dedupe([complex(z) for z in found[order]])[:k]
    residuals = [float(abs(_f(r, a, eta, tau))) for r in roots]
    rhp = -1
    if count:
        rhp, _ = count_rhp_roots_safe(a, eta, tau, 0.0)
    return RootReport(
        rhp_count=rhp,
        roots=roots,
        residuals=residuals,
        contour_radius=_contour_radius(a, eta, tau, 0.0),
        margin=margin,
    )
