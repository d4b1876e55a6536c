"""End-to-end acceptance checks; each prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the summary lines.
"""

import cmath
import csv
import io
import math
import time

import numpy as np
import pytest

from ddestab.cli import run
from ddestab.core import DdeProblem, Status, reduce
from ddestab.delay import DelayKind, critical_delay, critical_delay_bisect
from ddestab.oracle import count_rhp_roots, rightmost_roots
from ddestab.region import (
    Lemma2Kind,
    boundary_curve,
    boundary_distance,
    classify_lemma2,
    membership,
)
from ddestab.simulate import decay_rate, integrate
from ddestab.sweep import sweep_grid

pytestmark = pytest.mark.slow

CASES = [(a, tau) for a in (-1.5, 0.0, 0.25) for tau in (0.5, 1.0, 2.0)]


def report(n, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
    assert ok, detail


def _strict_stable(prob):
    red = reduce(prob)
    return membership(red.eta, red.a, prob.tau, tol=0).status is Status.STABLE


def test_criterion_1_real_gamma_threshold():
    t0 = time.perf_counter()
    lo, hi = 1.0, 10.0
    assert _strict_stable(DdeProblem(20j, lo, 0.1)) and not _strict_stable(DdeProblem(20j, hi, 0.1))
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if _strict_stable(DdeProblem(20j, mid, 0.1)):
            lo = mid
        else:
            hi = mid
    elapsed = time.perf_counter() - t0
    err = abs(lo - (20 - 5 * math.pi))
    report(1, err <= 1e-6 and elapsed < 1,
           f"gamma_crit={lo:.12f} |err|={err:.1e} (tol 1e-6), {elapsed:.3f}s (< 1s)")


def test_criterion_2_example_verdict():
    t0 = time.perf_counter()
    prob = DdeProblem(0.25 + 0.25j * math.pi, -(1 + 1j) / math.sqrt(2), 1.0)
    red = reduce(prob)
    verdict = membership(red.eta, red.a, prob.tau)
    count = count_rhp_roots(red.a, red.eta, prob.tau)
    s1 = rightmost_roots(red.a, red.eta, prob.tau, k=1, count=False).roots[0]
    elapsed = time.perf_counter() - t0
    ok = verdict.status is Status.STABLE and count == 0 and s1.real < 0 and elapsed < 1
    report(2, ok, f"verdict={verdict.status.value} count={count} Re s1={s1.real:.6f} "
                  f"{elapsed:.3f}s (< 1s)")


def test_criterion_3_critical_delay():
    eta = complex(-1, 1 / math.sqrt(8))
    closed = (2 * math.sqrt(2) / 3) * (math.pi / 2 - math.atan(1 / math.sqrt(8)))
    cd = critical_delay(0.0, eta)
    bis = critical_delay_bisect(0.0, eta, 4.0)
    s = rightmost_roots(0.0, eta, cd.tau_star, k=1, count=False).roots[0]
    ok = (cd.kind is DelayKind.FINITE and abs(cd.tau_star - closed) <= 1e-9
          and abs(bis - closed) <= 1e-9 and abs(s.real) <= 1e-6
          and abs(cd.tau_star - 1.1605596) < 1e-7)
    report(3, ok, f"tau*={cd.tau_star:.13f} closed-form diff={abs(cd.tau_star - closed):.1e} "
                  f"bisection diff={abs(bis - closed):.1e} (tol 1e-9), |Re s|={abs(s.real):.1e} (tol 1e-6)")


def test_criterion_4_disc(rng):
    bad = []
    for _ in range(200):
        a = -10 ** rng.uniform(-1.5, 1)
        eta = abs(a) * rng.uniform(0, 0.999) * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
        tau = 10 ** rng.uniform(-2, 2)
        v = membership(eta, a, tau)
        c = count_rhp_roots(a, eta, tau)
        if v.status is not Status.STABLE or c != 0:
            bad.append((a, eta, tau, v.status.value, c))
    report(4, not bad, f"{200 - len(bad)}/200 disc instances Stable with zero roots in Re s >= 0")


def test_criterion_5_grid_agreement():
    t0 = time.perf_counter()
    total = agree = 0
    failures = []
    for a, tau in CASES:
        for cell in sweep_grid(a, tau, resolution=41):
            eta = complex(cell.re_eta, cell.im_eta)
            if boundary_distance(eta, a, tau, within=1e-3) < 1e-3:
                continue
            total += 1
            agree += cell.agree
            if not cell.agree:
                failures.append((a, tau, eta))
    elapsed = time.perf_counter() - t0
    report(5, agree == total and elapsed < 60,
           f"{agree}/{total} cells agree outside the 1e-3 band (need 100%), {elapsed:.1f}s (< 60s)"
           + (f" first miss {failures[0]}" if failures else ""))


def _cli_boundary(a, tau, samples, tmp_path):
    path = tmp_path / f"boundary_{a}_{tau}.csv"
    assert run(["boundary", "--a", repr(a), "--tau", repr(tau), "--samples", str(samples),
                "-o", str(path)]) == 0
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    upper = [r for r in rows if r["branch"] == "upper"]
    lower = [r for r in rows if r["branch"] == "lower"]
    pts = [complex(float(r["re_eta"]), float(r["im_eta"])) for r in upper + lower]
    w = np.array([float(r["w"]) for r in upper])
    ang = np.array([float(r["arg_eta"]) for r in upper])
    return pts, w, ang


def _ray_radii(w, ang):
    """Split the upper arc into pieces monotone in argument; w as a function of angle."""
    d = np.sign(np.diff(ang))
    cut = np.flatnonzero(d[1:] != d[:-1]) + 1
    pieces = []
    start = 0
    for c in list(cut) + [len(ang) - 1]:
        seg = slice(start, c + 1)
        x, y = ang[seg], w[seg]
        if x[0] > x[-1]:
            x, y = x[::-1], y[::-1]
        pieces.append((x, y))
        start = c
    return pieces


def test_criterion_6_nesting(rng, tmp_path):
    bad = []
    n_checked = 0
    while n_checked < 100:
        a = rng.uniform(-2, 0.4)
        eta = complex(rng.uniform(-3, 1), rng.uniform(-2, 2))
        if membership(eta, a, 2.0).status is not Status.STABLE:
            continue
        n_checked += 1
        for t in (1.0, 0.5):
            if membership(eta, a, t).status is not Status.STABLE:
                bad.append((a, eta, t))
    ok_random = not bad

    # curves drawn from CLI output: larger delay lies inside the smaller-delay region,
    # and along every shared ray the outer radius shrinks (inner radius grows for a > 0)
    ray_viol = 0
    point_viol = 0
    samples = 2000
    for a in (-1.5, 0.0, 0.25):
        curves = {t: _cli_boundary(a, t, samples, tmp_path) for t in (0.5, 1.0, 2.0)}
        for big, small in ((2.0, 1.0), (1.0, 0.5)):
            for p in curves[big][0][:: 10]:
                if membership(p, a, small, tol=1e-6).status is Status.UNSTABLE:
                    point_viol += 1
            pb = _ray_radii(curves[big][1], curves[big][2])
            ps = _ray_radii(curves[small][1], curves[small][2])
            outer_b, outer_s = pb[-1], ps[-1]
            lo = max(outer_b[0][0], outer_s[0][0])
            hi = min(outer_b[0][-1], outer_s[0][-1])
            th = np.linspace(lo, hi, 200)
            rb = np.interp(th, *outer_b)
            rs = np.interp(th, *outer_s)
            ray_viol += int(np.sum(rb > rs + 1e-3))
            if a > 0:
                inner_b, inner_s = pb[0], ps[0]
                lo = max(inner_b[0][0], inner_s[0][0])
                hi = min(inner_b[0][-1], inner_s[0][-1])
                th = np.linspace(lo, hi, 200)
                ray_viol += int(np.sum(np.interp(th, *inner_b) < np.interp(th, *inner_s) - 1e-3))
    ok = ok_random and ray_viol == 0 and point_viol == 0
    report(6, ok, f"{100 - len(bad)}/100 random Stable at tau=2 stay Stable at 1 and 0.5; "
                  f"boundary CSV nesting: {ray_viol} ray violations, {point_viol} point violations")


def test_criterion_7_lemma2(rng):
    betas = np.concatenate([rng.uniform(-2.5, 1.0, 194), [-math.pi / 2, 0.0, -1e-9, -1.5, 0.5, -2.0]])
    r = np.concatenate([[0.0], np.logspace(-8, 12, 40001)])
    kinds = set()
    mismatches = 0
    worst = 0.0
    for beta in betas:
        c = classify_lemma2(beta)
        kinds.add(c.kind)
        phi = np.arctan(r) + beta - r / (r * r + 1)
        ok_set = phi >= 0
        if c.kind is Lemma2Kind.FULL_RAY:
            good = ok_set.all()
        elif c.kind is Lemma2Kind.EMPTY:
            good = not ok_set.any()
        else:
            far = np.abs(r - c.r0) > 1e-9 * max(1.0, c.r0)
            good = np.array_equal(ok_set[far], (r >= c.r0)[far]) and ok_set.any() and not ok_set.all()
            worst = max(worst, abs(c.r0 / (c.r0 ** 2 + 1) - math.atan(c.r0) - beta))
        mismatches += not good
    ok = mismatches == 0 and worst <= 1e-12 and len(kinds) == 3
    report(7, ok, f"{len(betas) - mismatches}/{len(betas)} beta match the sign scan, "
                  f"{len(kinds)} classes seen, max r0 residual {worst:.1e} (tol 1e-12)")


def test_criterion_8_boundary_marginal():
    n = 0
    bad_verdict = 0
    worst = 0.0
    for a, tau in CASES:
        curve = boundary_curve(a, tau, 60)
        for p in list(curve.points) + list(curve.lower()):
            n += 1
            if membership(p, a, tau).status is not Status.MARGINAL:
                bad_verdict += 1
            s = rightmost_roots(a, p, tau, k=1, count=False).roots[0]
            worst = max(worst, abs(s.real))
    report(8, bad_verdict == 0 and worst <= 1e-6,
           f"{n - bad_verdict}/{n} boundary samples Marginal, max |Re s1| {worst:.1e} (tol 1e-6)")


def _horizon(a, eta, tau):
    roots = rightmost_roots(a, eta, tau, k=2, count=False).roots
    s1 = roots[0].real
    gap = s1 - roots[1].real if len(roots) > 1 else 1.0
    T = max(30 * tau, 20 / max(gap, 1e-2), 10 / abs(s1))
    # keep |x| well inside double range when decaying
    return min(T, 500 / abs(s1), 4000 * tau), s1


def test_criterion_9_simulation(rng):
    t0 = time.perf_counter()
    n = 0
    sign_bad = 0
    worst = 0.0
    while n < 50:
        tau = rng.uniform(0.5, 2.0)
        a = rng.uniform(-1.5, min(0.5, 0.9 / tau))
        b = rng.uniform(-2, 2)
        gamma = complex(rng.uniform(-3, 1), rng.uniform(-2, 2))
        prob = DdeProblem(complex(a, b), gamma, tau)
        red = reduce(prob)
        if boundary_distance(red.eta, red.a, tau, within=0.05) < 0.05:
            continue
        n += 1
        stable = membership(red.eta, red.a, tau).status is Status.STABLE
        T, s1 = _horizon(red.a, red.eta, tau)
        rate = decay_rate(integrate(prob, T=T))
        sign_bad += (rate < 0) != stable
        worst = max(worst, abs(rate - s1))
    elapsed = time.perf_counter() - t0
    ok = sign_bad == 0 and worst <= 5e-2 and elapsed < 120
    report(9, ok, f"{50 - sign_bad}/50 signs match, max |rate - Re s1| {worst:.1e} (tol 5e-2), "
                  f"{elapsed:.1f}s (< 120s)")
