"""Argument checks shared by the estimator wrappers."""

from __future__ import annotations

import math

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import ConfigError

FEATURES = ("lam", "M", "xi", "rho")


def check_real(name, value, lo=-math.inf, hi=math.inf, lo_open=False, hi_open=False):
    if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
        raise ConfigError(f"must be a real number, got {value!r}", name)
    v = float(value)
    ok_lo = v > lo if lo_open else v >= lo
    ok_hi = v < hi if hi_open else v <= hi
    if math.isnan(v) or not (ok_lo and ok_hi):
        lb = "(" if lo_open else "["
        rb = ")" if hi_open else "]"
        raise ConfigError(f"must lie in {lb}{lo:g}, {hi:g}{rb}, got {value!r}", name)
    return v


def check_choice(name, value, choices):
    if value not in choices:
        raise ConfigError(f"must be one of {', '.join(map(str, choices))}, got {value!r}", name)
    return value


def check_scenarios(X) -> np.ndarray:
    """2-D float array with columns ``lam, M, xi, rho`` and every row in its domain."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != len(FEATURES):
        raise ConfigError(
            f"expected {len(FEATURES)} columns ({', '.join(FEATURES)}), got {X.shape[1]}", "X"
        )
    lam, M, xi, rho = X.T
    for name, bad in (("lam", ~(lam > 0)), ("M", ~(M > 0)), ("xi", ~(xi > 0)),
                      ("rho", ~((rho > 0) & (rho < 1)))):
        if bad.any():
            row = int(np.flatnonzero(bad)[0])
            raise ConfigError(f"row {row} out of domain: {X[row, FEATURES.index(name)]!r}",
                              f"X.{name}")
    return X
