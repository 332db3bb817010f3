"""scikit-learn compatible wrappers.

:class:`WeightedDimensionBound` maps rows of weight vectors to their
dimension bounds, so sweeps over weights can sit inside a ``Pipeline`` or a
``ColumnTransformer``.  :class:`BoxCountingDimension` fits the log-log slope
of a box-counting ladder.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .bounds import full_report
from .core import validate_weights
from .exact import to_fraction
from .exceptions import ValidationError
from .limsup import dimension_estimate


def _as_fraction(value) -> Fraction:
    # floats are read through their shortest repr, so 0.2 means 1/5
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise ValidationError(f"non-finite weight {value!r}")
        return Fraction(repr(float(value)))
    if isinstance(value, np.integer):
        return Fraction(int(value))
    return to_fraction(value)


def check_weight_rows(X, n_features: int) -> list[list[Fraction]]:
    """Validate a 2-D input of weights and convert every entry to a Fraction."""
    if hasattr(X, "to_numpy"):
        X = X.to_numpy()
    arr = np.asarray(X, dtype=object)
    if arr.ndim != 2:
        raise ValidationError(f"expected a 2-D array of weights, got {arr.ndim} dimension(s)")
    if arr.shape[1] != n_features:
        raise ValidationError(f"expected {n_features} weight columns, got {arr.shape[1]}")
    return [[_as_fraction(v) for v in row] for row in arr]


class WeightedDimensionBound(TransformerMixin, BaseEstimator):
    """Transform weight vectors into their dimension lower bounds.

    Parameters
    ----------
    d : int, default=1
        Manifold dimension.
    m : int, default=1
        Codimension; inputs have ``d + m`` columns.
    exact : bool, default=False
        Return an object array of Fractions instead of floats.
    on_invalid : {"raise", "nan"}, default="raise"
        What to do with rows that fail the admissibility conditions.

    Output columns are ``theorem_min``, ``effective_bound``, ``mtp_min`` and
    ``blw_condition_holds``.
    """

    _columns = ("theorem_min", "effective_bound", "mtp_min", "blw_condition_holds")

    def __init__(self, d=1, m=1, exact=False, on_invalid="raise"):
        self.d = d
        self.m = m
        self.exact = exact
        self.on_invalid = on_invalid

    def fit(self, X, y=None):
        if self.on_invalid not in ("raise", "nan"):
            raise ValueError(f"on_invalid must be 'raise' or 'nan', got {self.on_invalid!r}")
        check_weight_rows(X, self.d + self.m)
        self.n_features_in_ = self.d + self.m
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        rows = check_weight_rows(X, self.n_features_in_)
        out = []
        for row in rows:
            try:
                r = full_report(validate_weights(row, self.d, self.m))
            except ValidationError:
                if self.on_invalid == "raise":
                    raise
                out.append([None] * 4 if self.exact else [np.nan] * 4)
                continue
            values = [r.theorem_min, r.effective_bound, r.mtp_min, r.blw_condition_holds]
            out.append(values if self.exact else [float(v) for v in values])
        return np.array(out, dtype=object if self.exact else float).reshape(len(rows), 4)

    def get_feature_names_out(self, input_features=None):
        return np.array(self._columns, dtype=object)


class BoxCountingDimension(RegressorMixin, BaseEstimator):
    """Least-squares box-counting slope.

    ``X`` holds grid steps ``delta`` (one column), ``y`` the box counts
    ``N(delta)``.  After fitting, ``dimension_`` is the slope of ``log N``
    against ``log(1/delta)``; :meth:`predict` returns fitted counts.  The
    estimate is heuristic: finite ladders converge slowly.
    """

    def fit(self, X, y):
        X = check_array(X, ensure_2d=False, dtype=float).reshape(-1)
        y = np.asarray(y, dtype=float).reshape(-1)
        if len(X) != len(y):
            raise ValidationError("X and y have different lengths")
        est = dimension_estimate(list(zip(X.tolist(), y.tolist())))
        self.dimension_ = est.slope
        self.intercept_ = est.intercept
        self.residual_ = est.residual
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "dimension_")
        X = check_array(X, ensure_2d=False, dtype=float).reshape(-1)
        return np.exp(self.intercept_ - self.dimension_ * np.log(X))
