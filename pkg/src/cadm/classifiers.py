"""Incremental base classifiers.

Both learners satisfy the same contract: ``fit`` rebuilds the model from
scratch on exactly the given batch, ``partial_fit`` folds a new batch into
the sufficient statistics without revisiting old data, ``predict_prob``
returns an (m, n) column-stochastic confidence matrix, and ``snapshot``
yields an independent deep copy whose predictions never change when the
original keeps learning.
"""

from __future__ import annotations

import abc
import copy

import numpy as np
from scipy.special import logsumexp

DEGENERATE_CONFIDENCE = 1e-6


class NotFittedError(RuntimeError):
    """Prediction or incremental update requested before any fit."""


class IncrementalClassifier(abc.ABC):
    """Contract shared by all base classifiers.

    The full set of ``n_classes`` is declared up front so confidence rows
    stay comparable across updates even while some classes are unseen.
    """

    def __init__(self, n_classes: int, n_features: int):
        if n_classes < 2:
            raise ValueError("need at least two classes")
        if n_features < 1:
            raise ValueError("need at least one feature")
        self.n_classes = n_classes
        self.n_features = n_features
        self.fitted_ = False

    def _check_X(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(f"expected (n, {self.n_features}) features, got {X.shape}")
        return X

    def _check_Xy(self, X, y):
        X = self._check_X(X)
        y = np.asarray(y, dtype=np.int64)
        if y.shape != (X.shape[0],):
            raise ValueError("need exactly one label per sample")
        if y.size and (y.min() < 0 or y.max() >= self.n_classes):
            raise ValueError(f"labels must lie in [0, {self.n_classes})")
        return X, y

    def _require_fitted(self):
        if not self.fitted_:
            raise NotFittedError(f"{type(self).__name__} is not fitted")

    @abc.abstractmethod
    def fit(self, X, y) -> "IncrementalClassifier":
        """Reinitialize from scratch on exactly this labeled batch."""

    @abc.abstractmethod
    def partial_fit(self, X, y) -> "IncrementalClassifier":
        """Fold a labeled batch into the model. Empty batches are no-ops."""

    @abc.abstractmethod
    def predict_prob(self, X) -> np.ndarray:
        """Confidence matrix of shape (n_classes, n_samples), columns sum to 1."""

    def snapshot(self) -> "IncrementalClassifier":
        return copy.deepcopy(self)

    def predict(self, X) -> np.ndarray:
        # argmax per column; ties break toward the lowest class index
        return np.argmax(self.predict_prob(X), axis=0)


def hard_pseudo_label(classifier: IncrementalClassifier, X) -> np.ndarray:
    """Argmax class per sample, used as a training label for unlabeled data."""
    return classifier.predict(X)


class GaussianNB(IncrementalClassifier):
    """Incremental Gaussian naive Bayes over a fixed set of classes.

    Per-class feature moments merge batch-wise through the pooled
    mean/variance update, so any partial_fit sequence reproduces a batch
    fit on the union of the data to float64 round-off. Likelihoods are
    evaluated in log space with log-sum-exp normalization, and raw
    variances are clamped at predict time to a floor of
    ``var_floor_scale * (max feature range seen)**2`` so constant features
    cannot divide by zero.
    """

    def __init__(self, n_classes: int, n_features: int, var_floor_scale: float = 1e-9):
        super().__init__(n_classes, n_features)
        if var_floor_scale <= 0:
            raise ValueError("variance floor scale must be positive")
        self.var_floor_scale = var_floor_scale
        self._reset_state()

    def _reset_state(self):
        m, d = self.n_classes, self.n_features
        self.class_count_ = np.zeros(m, dtype=np.float64)
        self.theta_ = np.zeros((m, d), dtype=np.float64)
        self.var_ = np.zeros((m, d), dtype=np.float64)
        self.feature_min_ = np.full(d, np.inf)
        self.feature_max_ = np.full(d, -np.inf)
        self.fitted_ = False

    @property
    def var_floor_(self) -> float:
        spread = np.max(self.feature_max_ - self.feature_min_)
        if not np.isfinite(spread) or spread <= 0.0:
            return self.var_floor_scale
        return self.var_floor_scale * spread * spread

    @property
    def effective_var_(self) -> np.ndarray:
        """Variances actually used in the likelihood (floored)."""
        return np.maximum(self.var_, self.var_floor_)

    def fit(self, X, y):
        X, y = self._check_Xy(X, y)
        if X.shape[0] == 0:
            raise ValueError("fit requires at least one sample")
        self._reset_state()
        self._absorb(X, y)
        return self

    def partial_fit(self, X, y):
        self._require_fitted()
        X, y = self._check_Xy(X, y)
        if X.shape[0] == 0:
            return self
        self._absorb(X, y)
        return self

    def _absorb(self, X, y):
        self.feature_min_ = np.minimum(self.feature_min_, X.min(axis=0))
        self.feature_max_ = np.maximum(self.feature_max_, X.max(axis=0))
        for c in np.unique(y):
            Xc = X[y == c]
            n_new = float(Xc.shape[0])
            mu_new = Xc.mean(axis=0)
            var_new = Xc.var(axis=0)
            n_old = self.class_count_[c]
            if n_old == 0:
                self.theta_[c] = mu_new
                self.var_[c] = var_new
            else:
                n_tot = n_old + n_new
                mu_old = self.theta_[c]
                ssd = (self.var_[c] * n_old + var_new * n_new
                       + (n_old * n_new / n_tot) * (mu_old - mu_new) ** 2)
                self.theta_[c] = (n_old * mu_old + n_new * mu_new) / n_tot
                self.var_[c] = ssd / n_tot
            self.class_count_[c] += n_new
        self.fitted_ = True

    def predict_prob(self, X) -> np.ndarray:
        self._require_fitted()
        X = self._check_X(X)
        n = X.shape[0]
        seen = np.flatnonzero(self.class_count_ > 0)
        if seen.size == 1:
            # degenerate single-class state: smoothed one-hot so no class
            # row is exactly zero and downstream cosines stay defined
            P = np.full((self.n_classes, n), DEGENERATE_CONFIDENCE / (self.n_classes - 1))
            P[seen[0]] = 1.0 - DEGENERATE_CONFIDENCE
            return P
        var = self.effective_var_
        total = self.class_count_.sum()
        joint = np.full((self.n_classes, n), -np.inf)
        for c in seen:
            log_prior = np.log(self.class_count_[c] / total)
            log_det = np.sum(np.log(2.0 * np.pi * var[c]))
            maha = np.sum((X - self.theta_[c]) ** 2 / var[c], axis=1)
            joint[c] = log_prior - 0.5 * (log_det + maha)
        log_norm = logsumexp(joint, axis=0)
        return np.clip(np.exp(joint - log_norm), 0.0, 1.0)


class RandomFeatureRLS(IncrementalClassifier):
    """Online ridge classifier on a frozen random tanh feature map.

    A seeded random projection (uniform(-1, 1) weights and biases, frozen
    after construction) lifts inputs to ``hidden`` tanh features; the
    output weights are the ridge least-squares solution onto one-hot
    targets, maintained exactly by block recursive-least-squares updates
    of the inverse covariance. Confidences are a softmax over the linear
    outputs.
    """

    def __init__(self, n_classes: int, n_features: int, hidden: int = 64,
                 ridge: float = 1e-3, seed: int = 0):
        super().__init__(n_classes, n_features)
        if hidden < 1:
            raise ValueError("hidden width must be positive")
        if ridge <= 0:
            raise ValueError("ridge regularization must be positive")
        self.hidden = hidden
        self.ridge = ridge
        self.seed = seed
        rng = np.random.default_rng(seed)
        self.weights_ = rng.uniform(-1.0, 1.0, size=(n_features, hidden))
        self.bias_ = rng.uniform(-1.0, 1.0, size=hidden)
        self._reset_solution()

    def _reset_solution(self):
        # P = (gamma I)^-1 and beta = 0 make the first block update land
        # exactly on the batch ridge solution
        self.P_ = np.eye(self.hidden) / self.ridge
        self.beta_ = np.zeros((self.hidden, self.n_classes))
        self.fitted_ = False

    def _features(self, X: np.ndarray) -> np.ndarray:
        return np.tanh(X @ self.weights_ + self.bias_)

    def _one_hot(self, y: np.ndarray) -> np.ndarray:
        return np.eye(self.n_classes)[y]

    def fit(self, X, y):
        X, y = self._check_Xy(X, y)
        if X.shape[0] == 0:
            raise ValueError("fit requires at least one sample")
        self._reset_solution()
        self._rls_update(X, y)
        return self

    def partial_fit(self, X, y):
        self._require_fitted()
        X, y = self._check_Xy(X, y)
        if X.shape[0] == 0:
            return self
        self._rls_update(X, y)
        return self

    def _rls_update(self, X, y):
        H = self._features(X)
        T = self._one_hot(y)
        # inverse covariance downdate via the matrix-inversion identity.
        # The gain K = P_new H^T is taken from the same solve and reused for
        # beta: recomputing it from the downdated P would amplify round-off
        # by the 1/ridge scale left in unexcited directions.
        PHt = self.P_ @ H.T
        gram = np.eye(H.shape[0]) + H @ PHt
        K = np.linalg.solve(gram, PHt.T).T
        self.P_ = self.P_ - K @ PHt.T
        self.P_ = 0.5 * (self.P_ + self.P_.T)
        self.beta_ = self.beta_ + K @ (T - H @ self.beta_)
        self.fitted_ = True

    def predict_prob(self, X) -> np.ndarray:
        self._require_fitted()
        X = self._check_X(X)
        logits = self._features(X) @ self.beta_
        logits -= logits.max(axis=1, keepdims=True)
        expo = np.exp(logits)
        P = (expo / expo.sum(axis=1, keepdims=True)).T
        return np.clip(P, 0.0, 1.0)


CLASSIFIER_KINDS = ("gnb", "rls")


def make_classifier(kind: str, n_classes: int, n_features: int,
                    seed: int = 0) -> IncrementalClassifier:
    """Build a base classifier by short name ('gnb' or 'rls')."""
    if kind == "gnb":
        return GaussianNB(n_classes, n_features)
    if kind == "rls":
        return RandomFeatureRLS(n_classes, n_features, seed=seed)
    raise ValueError(f"unknown classifier kind: {kind!r} (expected one of {CLASSIFIER_KINDS})")
