"""Grid comparison of the region test against the root-counting oracle."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import Status
from .oracle import ContourGrazing, count_rhp_roots
from .region import TOL_BOUNDARY, membership

__all__ = ["SweepCell", "VERDICT_CODES", "sweep_cell", "sweep_grid"]

VERDICT_CODES = {Status.STABLE: 1, Status.MARGINAL: 0, Status.UNSTABLE: -1}
_AXIS_BAND = 1e-6


@dataclass(frozen=True)
class SweepCell:
    re_eta: float
    im_eta: float
    verdict_code: int
    oracle_count: int
    agree: bool


def _count_strictly_right(a, eta, tau):
    # roots with Re s > 1e-6, then roots with Re s > -1e-6; None when a contour grazes
    try:
        right = count_rhp_roots(a, eta, tau, -_AXIS_BAND)
        near = count_rhp_roots(a, eta, tau, _AXIS_BAND)
    except ContourGrazing:
        return None, None
    return right, near


def sweep_cell(args) -> SweepCell:
    a, tau, u, v, tol = args
    eta = complex(u, v)
    status = membership(eta, a, tau, tol=tol).status
    right, near = _count_strictly_right(a, eta, tau)
    if right is None:
        # a root sits within rounding of Re s = +-1e-6: only Marginal can agree
        return SweepCell(u, v, VERDICT_CODES[status], -1, status is Status.MARGINAL)
    if status is Status.STABLE:
        agree = near == 0
    elif status is Status.UNSTABLE:
        agree = right >= 1
    else:
        agree = right == 0 and near >= 1
    return SweepCell(u, v, VERDICT_CODES[status], right, agree)


def sweep_grid(a, tau, re_range=(-3.0, 1.0), im_range=(-2.0, 2.0), resolution=41,
               tol=TOL_BOUNDARY, jobs=1):
    """Evaluate every cell of a resolution x resolution grid in row-major order.

    Rows run over Im eta (ascending), columns over Re eta (ascending).
    """
    us = np.linspace(re_range[0], re_range[1], resolution)
    vs = np.linspace(im_range[0], im_range[1], resolution)
    tasks = [(float(a), float(tau), float(u), float(v), float(tol)) for v in vs for u in us]
    if jobs == 1:
        return [sweep_cell(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(sweep_cell, tasks, chunksize=64))
