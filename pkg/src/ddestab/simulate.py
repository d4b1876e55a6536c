"""Method-of-steps integration of x'(t) = lam*x(t) + gam*x(t - tau).

The grid is aligned to the delay (``dt = tau / steps_per_delay``) so every
delayed sample is either a stored grid value or a midpoint between two of
them. Within one delay interval the delayed term is known data and classical
RK4 reduces to the linear recurrence ``x[n+1] = rho*x[n] + c[n]``, which is
evaluated with :func:`scipy.signal.lfilter` instead of a Python loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .core import DdeProblem

__all__ = ["Trajectory", "InsufficientData", "integrate", "decay_rate"]

DIVERGENCE_CAP = 1e12


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class Trajectory:
    """Samples on t = -tau, -tau + dt, ..., starting with the history segment.

    ``diverged`` is set when |x| passed ``DIVERGENCE_CAP``; integration stops
    at the end of that delay interval.
    """

    times: np.ndarray
    values: np.ndarray
    tau: float
    dt: float
    diverged: bool = False

    @property
    def steps_per_delay(self) -> int:
        return int(round(self.tau / self.dt))


def _lagrange_weights(nodes, x):
    """Weights of the interpolating polynomial through ``nodes`` evaluated at ``x``."""
    nodes = np.asarray(nodes, dtype=float)
    w = np.ones(len(nodes))
    for i, xi in enumerate(nodes):
        for j, xj in enumerate(nodes):
            if i != j:
                w[i] *= (x - xj) / (xi - xj)
    return w


# Midpoint between nodes 0 and 1 from four equispaced samples, in grid units.
_MID_CENTERED = _lagrange_weights([-1, 0, 1, 2], 0.5)  # (-1, 9, 9, -1) / 16
_MID_RIGHT = _lagrange_weights([0, 1, 2, 3], 0.5)
_MID_LEFT = _lagrange_weights([-2, -1, 0, 1], 0.5)


def _constant_history(value=1.0 + 0j):
    return lambda t: np.full(np.shape(t), value, dtype=complex)


def integrate(problem: DdeProblem, history=None, T: float = 10.0,
              steps_per_delay: int = 64) -> Trajectory:
    """Integrate on [0, T] from ``history`` on [-tau, 0] (default: constant 1).

    ``history`` must accept a numpy array of times and return complex values.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    if steps_per_delay < 16:
        raise ValueError("steps_per_delay must be at least 16")
    if history is None:
        history = _constant_history()
    lam, gam, tau = problem.lam, problem.gamma, problem.tau
    N = int(steps_per_delay)
    dt = tau / N
    n_intervals = int(math.ceil(T / tau - 1e-12))

    hist_t = -tau + dt * np.arange(N + 1)
    hist_t[-1] = 0.0
    hist_x = np.asarray(history(hist_t), dtype=complex) * np.ones(N + 1)
    hist_mid = np.asarray(history(hist_t[:-1] + 0.5 * dt), dtype=complex) * np.ones(N)

    # x[0] is t = -tau; x[N] is t = 0; x[(k+1)*N] is t = k*tau
    x = np.empty((n_intervals + 1) * N + 1, dtype=complex)
    x[: N + 1] = hist_x

    z = lam * dt
    rho = 1 + z + z * z / 2 + z ** 3 / 6 + z ** 4 / 24
    diverged = False
    last = N
    for k in range(n_intervals):
        base = k * N  # index of t = (k-1)*tau, start of the delayed window
        g0 = gam * x[base: base + N]
        g1 = gam * x[base + 1: base + N + 1]
        if k == 0:
            xm = hist_mid
        else:
            xm = _delayed_midpoints(x, base, N)
        gh = gam * xm
        # RK4 stages with x = 0 give the forcing part of the step
        k1 = g0
        k2 = lam * (dt / 2) * k1 + gh
        k3 = lam * (dt / 2) * k2 + gh
        k4 = lam * dt * k3 + g1
        c = (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        start = (k + 1) * N
        zi = np.array([rho * x[start]])
        y, _ = lfilter([1.0], [1.0, -rho], c, zi=zi)
        x[start + 1: start + N + 1] = y
        last = start + N
        if not np.all(np.isfinite(y)) or np.abs(y).max() > DIVERGENCE_CAP:
            diverged = True
            break

    x = x[: last + 1]
    times = -tau + dt * np.arange(len(x))
    return Trajectory(times=times, values=x, tau=tau, dt=dt, diverged=diverged)


def _delayed_midpoints(x, base, N):
    """Cubic midpoints of x between consecutive samples base..base+N.

    Stencils stay inside [base, base + N]: the solution loses one order of
    smoothness at every multiple of tau, and x past base + N is not yet known.
    """
    j = base + np.arange(N)  # midpoint between j and j + 1
    left = j - 1
    right = j + 2
    use_right = left < base
    use_left = right > base + N
    centered = ~(use_right | use_left)
    out = np.empty(N, dtype=complex)
    if centered.any():
        jj = j[centered]
        out[centered] = sum(w * x[jj + o] for w, o in zip(_MID_CENTERED, (-1, 0, 1, 2)))
    if use_right.any():
        jj = j[use_right]
        out[use_right] = sum(w * x[jj + o] for w, o in zip(_MID_RIGHT, (0, 1, 2, 3)))
    if use_left.any():
        jj = j[use_left]
        out[use_left] = sum(w * x[jj + o] for w, o in zip(_MID_LEFT, (-2, -1, 0, 1)))
    return out


def decay_rate(trajectory: Trajectory, tail_fraction: float = 0.5) -> float:
    """Least-squares slope of log|x(t)| over the trailing part of [0, T]."""
    if not 0 < tail_fraction <= 0.5:
        raise ValueError("tail_fraction must lie in (0, 0.5]")
    t = trajectory.times
    x = np.abs(trajectory.values)
    mask = t >= 0
    t, x = t[mask], x[mask]
    if len(t) == 0:
        raise InsufficientData("empty trajectory")
    t_end = t[-1]
    keep = (t >= t_end * (1 - tail_fraction)) & (x > 1e-300)
    if keep.sum() < 10:
        raise InsufficientData(f"only {int(keep.sum())} usable samples")
    slope, _ = np.polyfit(t[keep], np.log(x[keep]), 1)
    return float(slope)
