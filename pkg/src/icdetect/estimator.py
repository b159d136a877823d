"""scikit-learn style wrapper around the detectors.

The detector is configured entirely through constructor parameters (detector
kind, modulations, gains, noise sigma); ``fit`` only validates them and builds
the alphabets, so an :class:`InterferenceDetector` can sit in pipelines, be
cloned, and be scored like any classifier whose classes are x1 symbol indices.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .constellation import make_constellation, squared_distances
from .detectors import DetectorKind, combined_points, detect_batch, ml_log_metrics
from .errors import InvalidInputError, UnsupportedKindError


def check_received(X):
    """Validate received samples.

    Accepts a 1-D array of samples (gains taken from the estimator), or an
    ``(n, 3)`` array whose columns are ``y, h11, h12`` for per-sample gains.
    Complex values are allowed; NaN/inf are rejected.
    """
    X = np.asarray(X)
    if X.dtype == object or not np.issubdtype(X.dtype, np.number):
        raise InvalidInputError("received samples must be numeric")
    X = X.astype(complex)
    if X.ndim == 2 and X.shape[1] == 1:
        X = X[:, 0]
    if X.ndim not in (1, 2) or (X.ndim == 2 and X.shape[1] != 3):
        raise InvalidInputError(f"expected shape (n,) or (n, 3), got {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InvalidInputError("received samples contain NaN or inf")
    return X


class InterferenceDetector(ClassifierMixin, BaseEstimator):
    """Hard detector of the desired symbol index at receiver 1.

    Parameters
    ----------
    detector : {"conv", "sic", "osic", "md", "ml"}
    mod1, mod2 : str
        Modulations of the desired and interfering transmitters, e.g. ``"pam4"``.
    h11, h12 : complex
        Desired and interfering gains used when ``X`` carries only samples.
    noise_sigma : float
        Per-real-dimension noise standard deviation (used by ``"ml"``).
    """

    def __init__(self, detector="md", mod1="pam2", mod2="pam2", h11=1.0, h12=0.0, noise_sigma=1.0):
        self.detector = detector
        self.mod1 = mod1
        self.mod2 = mod2
        self.h11 = h11
        self.h12 = h12
        self.noise_sigma = noise_sigma

    def fit(self, X=None, y=None):
        self.kind_ = DetectorKind.parse(self.detector)
        self.s1_ = make_constellation(self.mod1)
        self.s2_ = make_constellation(self.mod2)
        if not (np.isfinite(self.h11) and np.isfinite(self.h12)):
            raise InvalidInputError("gains must be finite")
        if not (np.isfinite(self.noise_sigma) and self.noise_sigma > 0):
            raise InvalidInputError("noise_sigma must be positive")
        self.classes_ = np.arange(self.s1_.order)
        return self

    def _split(self, X):
        X = check_received(X)
        if X.ndim == 1:
            return X, self.h11, self.h12
        return X[:, 0], X[:, 1], X[:, 2]

    def predict_pairs(self, X):
        """``(x1_indices, x2_indices or None)``."""
        check_is_fitted(self, "kind_")
        y, h11, h12 = self._split(X)
        return detect_batch(self.kind_, y, h11, h12, self.s1_, self.s2_, self.noise_sigma)

    def predict(self, X):
        return self.predict_pairs(X)[0]

    def predict_symbols(self, X):
        return self.s1_.points[self.predict(X)]

    def decision_function(self, X):
        """Per-class log-metric, shape ``(n, M1)``; argmax reproduces ``predict``.

        Defined for the single-stage detectors: ML gives the exact log-likelihood,
        MD its max-log approximation and conv the interference-blind one.
        """
        check_is_fitted(self, "kind_")
        y, h11, h12 = self._split(X)
        h11 = np.broadcast_to(np.asarray(h11, dtype=complex), y.shape)
        h12 = np.broadcast_to(np.asarray(h12, dtype=complex), y.shape)
        scale = 2.0 * self.noise_sigma**2
        if self.kind_ is DetectorKind.MAX_LIKELIHOOD:
            return ml_log_metrics(y, h11, h12, self.s1_, self.s2_, self.noise_sigma)
        if self.kind_ is DetectorKind.MIN_DISTANCE:
            d = squared_distances(y[:, None, None], combined_points(h11, h12, self.s1_, self.s2_))
            return -d.min(axis=-1) / scale
        if self.kind_ is DetectorKind.CONVENTIONAL:
            return -squared_distances(y[:, None], h11[:, None] * self.s1_.points) / scale
        raise UnsupportedKindError(f"{self.kind_.name} has no single-stage decision metric")
