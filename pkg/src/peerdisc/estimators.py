"""scikit-learn style wrappers: each row of ``X`` is a scenario ``(lam, M, xi, rho)``.

The channel is fixed by the estimator parameters, so ``fit`` only validates
them; ``predict`` maps scenarios to E{S}. This lets the usual tooling
(``get_params``, ``clone``, grid utilities) drive parameter studies.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import analysis
from ._validation import FEATURES, check_choice, check_real, check_scenarios
from .analysis import ChannelModel, DiscoveryParams, NetworkModel
from .simulator import SimConfig, default_radius, estimate_es
from .sweep import derive_seed

__all__ = ["AnalyticalDiscovery", "MonteCarloDiscovery"]

METHODS = ("auto", "zero-noise", "rayleigh-noise", "general")


class _ChannelMixin:
    def _check_channel(self):
        check_real("alpha", self.alpha, 2, np.inf, lo_open=True, hi_open=True)
        check_real("m_s", self.m_s, 0.5, np.inf, hi_open=True)
        check_real("m_i", self.m_i, 0.5, np.inf, hi_open=True)
        check_real("sigma2", self.sigma2, 0, np.inf, hi_open=True)
        check_real("chi_db", self.chi_db, 0, np.inf, hi_open=True)
        return ChannelModel(self.alpha, self.m_s, self.m_i, self.sigma2, self.chi_db)

    @staticmethod
    def _row(x):
        lam, M, xi, rho = (float(v) for v in x)
        return NetworkModel(lam), DiscoveryParams(M, xi, rho)


class AnalyticalDiscovery(_ChannelMixin, BaseEstimator):
    """E{S} from the analysis.

    method : 'auto' picks the closed form when one applies and falls back to
        the general integral; the other values force one path and raise
        ``RegimeError`` outside its regime.
    """

    def __init__(self, alpha=4.0, m_s=1, m_i=1, sigma2=0.0, chi_db=0.0, method="auto"):
        self.alpha = alpha
        self.m_s = m_s
        self.m_i = m_i
        self.sigma2 = sigma2
        self.chi_db = chi_db
        self.method = method

    def fit(self, X=None, y=None):
        self.channel_ = self._check_channel()
        check_choice("method", self.method, METHODS)
        if X is not None:
            check_scenarios(X)
        self.n_features_in_ = len(FEATURES)
        return self

    def _one(self, net, dp):
        ch = self.channel_
        if self.method == "zero-noise":
            return analysis.es_zero_noise(ch, dp)
        if self.method == "rayleigh-noise":
            return analysis.es_rayleigh_noise(net, ch, dp)
        if self.method == "general":
            return analysis.es_general(net, ch, dp)
        rep = analysis.analytical_report(net, ch, dp)
        if rep["closed_form"] is not None:
            return rep["closed_form"]
        return analysis.es_general(net, ch, dp)

    def predict(self, X):
        check_is_fitted(self, "channel_")
        X = check_scenarios(X)
        return np.array([self._one(*self._row(x)) for x in X])


class MonteCarloDiscovery(_ChannelMixin, BaseEstimator):
    """Monte Carlo E{S}; row ``i`` uses a seed derived from ``(seed, i)``."""

    def __init__(self, alpha=4.0, m_s=1, m_i=1, sigma2=0.0, chi_db=0.0, trials=20_000,
                 seed=20140101, window_radius=None, n_jobs=None):
        self.alpha = alpha
        self.m_s = m_s
        self.m_i = m_i
        self.sigma2 = sigma2
        self.chi_db = chi_db
        self.trials = trials
        self.seed = seed
        self.window_radius = window_radius
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        self.channel_ = self._check_channel()
        check_real("trials", self.trials, 1)
        check_real("seed", self.seed, 0)
        if self.window_radius is not None:
            check_real("window_radius", self.window_radius, 0, np.inf, lo_open=True)
        if X is not None:
            check_scenarios(X)
        self.n_features_in_ = len(FEATURES)
        return self

    def predict_estimates(self, X):
        """List of :class:`~peerdisc.simulator.Estimate`, one per row."""
        check_is_fitted(self, "channel_")
        X = check_scenarios(X)
        out = []
        for i, x in enumerate(X):
            net, dp = self._row(x)
            radius = self.window_radius or default_radius(net, self.channel_, dp)
            cfg = SimConfig(net, self.channel_, dp, radius, int(self.trials),
                            derive_seed(int(self.seed), i))
            out.append(estimate_es(cfg, n_jobs=self.n_jobs))
        return out

    def predict(self, X):
        return np.array([e.mean for e in self.predict_estimates(X)])
