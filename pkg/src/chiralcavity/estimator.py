"""scikit-learn style classifier over single-shot homodyne counts."""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_array, check_is_fitted

from . import detection
from .dynamics import MODELS


class ChiralDiscriminator(ClassifierMixin, BaseEstimator):
    """Decide Left/Right from integrated homodyne counts.

    ``fit`` simulates both hypotheses for ``config`` and stores the mean
    counts; no training data is needed (``X`` and ``y`` are accepted and
    ignored so the estimator composes with sklearn tooling).  ``predict``
    applies the zero-threshold sign rule to counts of shape (n_shots, 1).

    Parameters
    ----------
    config : RunConfig
        Scenario to simulate.
    model : {"first", "dissipative", "second"}
        Equations of motion used for the two hypotheses.
    N_lo : float or None
        Local-oscillator photon rate; None takes it from ``config``.
    random_state : int, Generator or None
        Used for sampling and for breaking exact ties.
    """

    def __init__(self, config=None, model="first", N_lo=None, random_state=None):
        self.config = config
        self.model = model
        self.N_lo = N_lo
        self.random_state = random_state

    def fit(self, X=None, y=None):
        if self.config is None:
            raise ValueError("ChiralDiscriminator needs a RunConfig")
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        nL, nR, window = detection.hypothesis_means(self.config, self.model)
        self.N_lo_ = float(self.config.detection.N_lo if self.N_lo is None else self.N_lo)
        self.window_ = window
        self.n_bar_ = np.array([nL, nR])
        self.classes_ = np.array(["L", "R"])
        self.stats_ = detection.shot_statistics(nL, nR, *window, N_lo=self.N_lo_)
        self.n_features_in_ = 1
        return self

    @property
    def _means(self):
        return self.n_bar_ * math.sqrt(self.N_lo_)

    @property
    def _std(self):
        t0, tf = self.window_
        return math.sqrt(self.N_lo_ * (tf - t0))

    def _counts(self, X):
        X = check_array(X, ensure_2d=True, dtype=np.float64)
        if X.shape[1] != 1:
            raise ValueError(f"expected counts of shape (n_shots, 1), got {X.shape}")
        return X[:, 0]

    def decision_function(self, X):
        """Signed count, positive towards the class with the larger mean."""
        check_is_fitted(self)
        n = self._counts(X)
        return n if self.n_bar_[0] >= self.n_bar_[1] else -n

    def predict(self, X):
        score = self.decision_function(X)
        left = score > 0
        tie = score == 0
        if tie.any():
            rng = check_random_state(self.random_state)
            left = np.where(tie, rng.random_sample(score.shape) < 0.5, left)
        return np.where(left, "L", "R")

    def predict_proba(self, X):
        """Posterior under equal priors from the two Gaussian count models."""
        check_is_fitted(self)
        n = self._counts(X)
        mL, mR = self._means
        # log-likelihood ratio is linear in n for equal variances
        llr = (mL - mR) * (n - 0.5 * (mL + mR)) / self._std**2
        pL = 0.5 * (1.0 + np.tanh(0.5 * llr))
        return np.column_stack([pL, 1.0 - pL])

    def sample(self, n_shots, random_state=None):
        """Draw ``n_shots`` counts per hypothesis; returns (X, y)."""
        check_is_fitted(self)
        rng = check_random_state(self.random_state if random_state is None else random_state)
        t0, tf = self.window_
        std = math.sqrt(self.N_lo_ * (tf - t0))
        mL, mR = self._means
        counts = np.concatenate([rng.normal(mL, std, n_shots), rng.normal(mR, std, n_shots)])
        y = np.repeat(self.classes_, n_shots)
        return counts[:, None], y
