"""scikit-learn compatible wrappers around the stability test and the critical delay.

Both estimators are stateless: ``fit`` only validates input and records the
number of features, so they drop into pipelines and grid searches.

>>> import numpy as np
>>> clf = StabilityClassifier(tau=1.0).fit(np.empty((0, 4)))
>>> clf.predict([[0.25, np.pi / 4, -2 ** -0.5, -2 ** -0.5]]).tolist()
['Stable']
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .core import DdeProblem, Status, reduce
from .delay import DelayKind, critical_delay
from .region import TOL_BOUNDARY, membership

__all__ = ["StabilityClassifier", "CriticalDelayTransformer"]

_PROBLEM_COLUMNS = ("lambda_re", "lambda_im", "gamma_re", "gamma_im")
_REDUCED_COLUMNS = ("a", "eta_re", "eta_im")


def _check_layout(layout):
    if layout not in ("problem", "reduced"):
        raise ValueError(f"layout must be 'problem' or 'reduced', got {layout!r}")
    return _PROBLEM_COLUMNS if layout == "problem" else _REDUCED_COLUMNS


class StabilityClassifier(ClassifierMixin, BaseEstimator):
    """Label rows of coefficients Stable, Marginal or Unstable.

    Parameters
    ----------
    tau : float
        Delay shared by all rows.
    layout : {'problem', 'reduced'}
        ``'problem'`` rows are (Re lam, Im lam, Re gamma, Im gamma);
        ``'reduced'`` rows are (a, Re eta, Im eta).
    tol_boundary : float
        Distance to the region boundary below which a row is Marginal.
    """

    def __init__(self, tau=1.0, layout="problem", tol_boundary=TOL_BOUNDARY):
        self.tau = tau
        self.layout = layout
        self.tol_boundary = tol_boundary

    def fit(self, X, y=None):
        columns = _check_layout(self.layout)
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        X = check_array(X, ensure_min_samples=0)
        if X.shape[1] != len(columns):
            raise ValueError(f"expected {len(columns)} columns {columns}, got {X.shape[1]}")
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([s.value for s in Status])
        return self

    def _verdicts(self, X):
        check_is_fitted(self, "classes_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        out = []
        for row in X:
            if self.layout == "problem":
                red = reduce(DdeProblem(complex(row[0], row[1]), complex(row[2], row[3]), self.tau))
                a, eta = red.a, red.eta
            else:
                a, eta = row[0], complex(row[1], row[2])
            out.append(membership(eta, a, self.tau, tol=self.tol_boundary))
        return out

    def predict(self, X):
        return np.array([v.status.value for v in self._verdicts(X)], dtype=object)

    def decision_case(self, X):
        """Case tags (which part of the test decided) for each row."""
        return np.array([v.case_tag.value for v in self._verdicts(X)], dtype=object)


class CriticalDelayTransformer(TransformerMixin, BaseEstimator):
    """Map reduced rows (a, Re eta, Im eta) to their critical delay.

    Output columns are (tau_star, omega); tau_star is ``inf`` when every
    delay is stable and ``0`` when none is, omega is NaN when undefined.
    """

    def fit(self, X, y=None):
        X = check_array(X, ensure_min_samples=0)
        if X.shape[1] != 3:
            raise ValueError(f"expected 3 columns {_REDUCED_COLUMNS}, got {X.shape[1]}")
        self.n_features_in_ = 3
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X)
        if X.shape[1] != 3:
            raise ValueError(f"X has {X.shape[1]} features, expected 3")
        out = np.empty((X.shape[0], 2))
        for i, (a, u, v) in enumerate(X):
            cd = critical_delay(a, complex(u, v))
            if cd.kind is DelayKind.ALWAYS_STABLE:
                out[i] = (np.inf, np.nan)
            elif cd.kind is DelayKind.NEVER_STABLE:
                out[i] = (0.0, np.nan)
            else:
                out[i] = (cd.tau_star, cd.crossing_omega)
        return out

    def get_feature_names_out(self, input_features=None):
        return np.array(["tau_star", "omega"], dtype=object)
