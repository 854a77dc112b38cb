"""Scikit-learn wrappers that train a linear model over a simulated MAC.

The training set is shuffled and dealt to ``n_nodes`` simulated devices, then
a single seeded run of the chosen algorithm fits the coefficients. Nothing
here is needed by the simulation library itself.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin
from sklearn.utils import check_random_state
from sklearn.utils.multiclass import check_classification_targets
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .algorithms import Algorithm, AlgorithmConfig, run
from .data import partition
from .harness import build_channel
from .problems import Family, NodeDataset, ProblemInstance

__all__ = ["AGMARegressor", "AGMAClassifier"]


class _MACLinearModel(BaseEstimator):
    """Shared fitting logic; subclasses choose the loss and label mapping."""

    _family = None

    def __init__(
        self,
        n_nodes=10,
        algorithm="AGMA",
        gain="rayleigh",
        mu_h=1.0,
        sigma_h_sq=None,
        sigma_w_sq=1.0,
        E_N=1.0,
        beta=None,
        alpha0=None,
        max_iter=100,
        restart_k0=None,
        fit_intercept=True,
        random_state=None,
    ):
        self.n_nodes = n_nodes
        self.algorithm = algorithm
        self.gain = gain
        self.mu_h = mu_h
        self.sigma_h_sq = sigma_h_sq
        self.sigma_w_sq = sigma_w_sq
        self.E_N = E_N
        self.beta = beta
        self.alpha0 = alpha0
        self.max_iter = max_iter
        self.restart_k0 = restart_k0
        self.fit_intercept = fit_intercept
        self.random_state = random_state

    def _channel(self):
        params = {"gain": self.gain, "mu_h": self.mu_h, "sigma_w_sq": self.sigma_w_sq, "E_N": self.E_N}
        if self.sigma_h_sq is not None:
            params["sigma_h_sq"] = self.sigma_h_sq
        return build_channel(params)

    def _fit_problem(self, X, y, l2=0.0):
        if Algorithm(self.algorithm) is Algorithm.CENTRAL_NESTEROV:
            raise ValueError("the centralized reference is not a trainable estimator")
        if not isinstance(self.n_nodes, (int, np.integer)) or self.n_nodes < 1:
            raise ValueError(f"n_nodes must be a positive integer, got {self.n_nodes!r}")
        if self.n_nodes > X.shape[0]:
            raise ValueError(f"n_nodes={self.n_nodes} exceeds the {X.shape[0]} training samples")
        seed = int(check_random_state(self.random_state).randint(2**31 - 1))
        parts = partition(X, y, self.n_nodes, seed)
        nodes = [NodeDataset(X[idx], y[idx]) for idx in parts]
        problem = ProblemInstance(nodes, family=self._family, l2=l2).with_constants()
        config = AlgorithmConfig(
            Algorithm(self.algorithm), beta=self.beta, alpha0=self.alpha0,
            max_iters=self.max_iter, restart_k0=self.restart_k0, seed=seed,
        )
        trace = run(config, problem, self._channel())
        self.n_features_in_ = X.shape[1]
        self.n_iter_ = int(trace.k[-1])
        self.loss_curve_ = trace.excess_risk
        self.beta_ = trace.beta
        self.constants_ = problem.constants
        return trace.theta_final


class AGMARegressor(RegressorMixin, _MACLinearModel):
    """Least-squares linear regression trained over a fading MAC.

    Parameters
    ----------
    n_nodes : int
        Number of simulated devices sharing the training set.
    algorithm : {"AGMA", "GBMA", "FDM_GD", "FDM_AGD"}
    gain : {"rayleigh", "uniform", "constant"}
        Fading law; ``sigma_h_sq`` is required for ``"uniform"``.
    beta : float, optional
        Stepsize; defaults to ``1 / (mu_h L)``.
    max_iter : int
        Number of gradient rounds.
    random_state : int, RandomState or None
        Seeds both the partition and the channel draws.

    Attributes
    ----------
    coef_, intercept_ : fitted model.
    loss_curve_ : ndarray
        Excess training risk per iteration.
    """

    _family = Family.LEAST_SQUARES

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        if self.fit_intercept:
            x_mean, y_mean = X.mean(axis=0), y.mean()
            theta = self._fit_problem(X - x_mean, y - y_mean)
            self.intercept_ = float(y_mean - x_mean @ theta)
        else:
            theta = self._fit_problem(X, y)
            self.intercept_ = 0.0
        self.coef_ = theta
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return X @ self.coef_ + self.intercept_


class AGMAClassifier(ClassifierMixin, _MACLinearModel):
    """L2-regularised binary logistic regression trained over a fading MAC.

    Takes the parameters of :class:`AGMARegressor` plus ``alpha``, the ridge
    weight (which also makes the problem strongly convex). With
    ``fit_intercept`` a constant feature is appended, so the intercept is
    regularised along with the weights.
    """

    _family = Family.LOGISTIC

    def __init__(self, alpha=0.1, n_nodes=10, algorithm="AGMA", gain="rayleigh", mu_h=1.0,
                 sigma_h_sq=None, sigma_w_sq=1.0, E_N=1.0, beta=None, alpha0=None,
                 max_iter=100, restart_k0=None, fit_intercept=True, random_state=None):
        super().__init__(
            n_nodes=n_nodes, algorithm=algorithm, gain=gain, mu_h=mu_h, sigma_h_sq=sigma_h_sq,
            sigma_w_sq=sigma_w_sq, E_N=E_N, beta=beta, alpha0=alpha0, max_iter=max_iter,
            restart_k0=restart_k0, fit_intercept=fit_intercept, random_state=random_state,
        )
        self.alpha = alpha

    def _augment(self, X):
        return np.hstack([X, np.ones((X.shape[0], 1))]) if self.fit_intercept else X

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        check_classification_targets(y)
        self.classes_ = np.unique(y)
        if len(self.classes_) != 2:
            raise ValueError(f"AGMAClassifier is binary; got {len(self.classes_)} classes")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        signs = np.where(y == self.classes_[1], 1.0, -1.0)
        theta = self._fit_problem(self._augment(X), signs, l2=float(self.alpha))
        self.n_features_in_ = X.shape[1]
        if self.fit_intercept:
            self.coef_, self.intercept_ = theta[:-1], float(theta[-1])
        else:
            self.coef_, self.intercept_ = theta, 0.0
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return X @ self.coef_ + self.intercept_

    def predict_proba(self, X):
        p = expit(self.decision_function(X))
        return np.column_stack([1.0 - p, p])

    def predict(self, X):
        return self.classes_[(self.decision_function(X) > 0).astype(int)]
