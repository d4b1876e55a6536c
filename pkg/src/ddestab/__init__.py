"""Asymptotic stability of x'(t) = lambda x(t) + gamma x(t - tau), lambda, gamma complex."""

from .core import (
    CaseTag,
    DdeProblem,
    ReducedProblem,
    RegionCase,
    RegionVariant,
    StabilityVerdict,
    Status,
    characteristic_value,
    crossing_frequency,
    reduce,
    region_case,
)
from .delay import CriticalDelay, DelayKind, critical_delay
from .estimator import CriticalDelayTransformer, StabilityClassifier
from .oracle import ContourGrazing, RootReport, count_rhp_roots, rightmost_roots
from .region import (
    BoundaryCurve,
    Lemma2Classification,
    Lemma2Kind,
    boundary_curve,
    classify_lemma2,
    delta_gamma_plus,
    eta_pi_magnitude,
    membership,
    w_extremum,
)
from .simulate import Trajectory, decay_rate, integrate

__version__ = "0.1.0"


def check(problem: DdeProblem, tol: float = 1e-9) -> StabilityVerdict:
    """Verdict for the original (unrotated) equation."""
    red = reduce(problem)
    return membership(red.eta, red.a, red.tau, tol=tol)
