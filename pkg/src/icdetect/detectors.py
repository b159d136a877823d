"""Hard symbol-by-symbol detectors for receiver 1.

Each detector comes in two flavours: a scalar ``detect_*`` function that
returns a :class:`Decision` with an instrumented comparison count, and the
vectorized :func:`detect_batch` used by the simulator.  Both share the same
distance arithmetic, so they agree bit for bit on ties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constellation import (
    Constellation,
    argmin_scan,
    check_finite,
    nearest,
    nearest_batch,
    squared_distances,
)
from .errors import InvalidInputError, InvalidNoiseError, UnsupportedDomainError, UnsupportedKindError


class DetectorKind(str, Enum):
    CONVENTIONAL = "conv"
    SIC = "sic"
    ORDERED_SIC = "osic"
    MIN_DISTANCE = "md"
    MAX_LIKELIHOOD = "ml"

    @property
    def ordinal(self) -> int:
        return list(DetectorKind).index(self)

    @classmethod
    def parse(cls, value) -> "DetectorKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for kind in cls:
            if key in (kind.value, kind.name.lower()):
                return kind
        raise UnsupportedKindError(f"unknown detector {value!r}")


@dataclass(frozen=True)
class Decision:
    x1_index: int
    x2_index: int | None
    comparisons: int
    metric_evaluations: int = 0


def _check_sigma(noise_sigma):
    if not (np.isfinite(noise_sigma) and noise_sigma > 0):
        raise InvalidNoiseError(f"noise_sigma must be positive and finite, got {noise_sigma}")


def detect_conventional(y, h11, s1: Constellation) -> Decision:
    """Slice ``y`` against ``h11*S1``, treating interference as noise."""
    k, comps = nearest(s1, h11, y)
    return Decision(k, None, comps)


def detect_sic(y, h11, h12, s1: Constellation, s2: Constellation) -> Decision:
    """Detect the interferer first, cancel it, then slice the residual."""
    check_finite(y, h11, h12)
    l, c2 = nearest(s2, h12, y)
    residual = complex(y) - complex(h12) * s2.points[l]
    k, c1 = nearest(s1, h11, residual)
    return Decision(k, l, c1 + c2)


def detect_ordered_sic(y, h11, h12, s1: Constellation, s2: Constellation) -> Decision:
    """SIC that detects the stronger received component first."""
    check_finite(y, h11, h12)
    if abs(h11) >= abs(h12):
        k, c1 = nearest(s1, h11, y)
        residual = complex(y) - complex(h11) * s1.points[k]
        l, c2 = nearest(s2, h12, residual)
        return Decision(k, l, c1 + c2)
    return detect_sic(y, h11, h12, s1, s2)


def combined_points(h11, h12, s1: Constellation, s2: Constellation) -> np.ndarray:
    """``h11*s1[k] + h12*s2[l]`` as an ``(M1, M2)`` array."""
    return np.asarray(h11)[..., None, None] * s1.points[:, None] + np.asarray(h12)[..., None, None] * s2.points[None, :]


def detect_min_distance(y, h11, h12, s1: Constellation, s2: Constellation) -> Decision:
    """Joint nearest point over ``h11*S1 + h12*S2``; keeps both indices."""
    check_finite(y, h11, h12)
    d = squared_distances(complex(y), combined_points(complex(h11), complex(h12), s1, s2))
    flat, comps = argmin_scan(d.ravel().tolist())
    k, l = divmod(flat, s2.order)
    return Decision(k, l, comps)


def ml_log_metrics(y, h11, h12, s1: Constellation, s2: Constellation, noise_sigma) -> np.ndarray:
    """Per-candidate log of the interference-marginalized likelihood.

    Shape ``(..., M1)``.  Evaluated as a max-shifted log-sum-exp so the result
    stays finite when every individual exponential would underflow.
    """
    y = np.asarray(y)
    pts = combined_points(h11, h12, s1, s2)
    a = -squared_distances(y[..., None, None], pts) / (2.0 * noise_sigma * noise_sigma)
    peak = np.max(a, axis=-1, keepdims=True)
    return peak[..., 0] + np.log(np.sum(np.exp(a - peak), axis=-1))


def detect_ml(y, h11, h12, s1: Constellation, s2: Constellation, noise_sigma) -> Decision:
    """Maximum-likelihood decision on x1 with x2 summed out."""
    _check_sigma(noise_sigma)
    check_finite(y, h11, h12)
    metrics = ml_log_metrics(complex(y), complex(h11), complex(h12), s1, s2, noise_sigma)
    k, comps = argmin_scan((-metrics).tolist())
    return Decision(k, None, comps, s1.order * s2.order)


def detect(kind, y, h11, h12, s1: Constellation, s2: Constellation, noise_sigma=1.0) -> Decision:
    kind = DetectorKind.parse(kind)
    if kind is DetectorKind.CONVENTIONAL:
        check_finite(h12)
        return detect_conventional(y, h11, s1)
    if kind is DetectorKind.SIC:
        return detect_sic(y, h11, h12, s1, s2)
    if kind is DetectorKind.ORDERED_SIC:
        return detect_ordered_sic(y, h11, h12, s1, s2)
    if kind is DetectorKind.MIN_DISTANCE:
        return detect_min_distance(y, h11, h12, s1, s2)
    return detect_ml(y, h11, h12, s1, s2, noise_sigma)


def detect_batch(kind, y, h11, h12, s1: Constellation, s2: Constellation, noise_sigma=1.0):
    """Vectorized detection over arrays of received samples.

    ``h11``/``h12`` may be scalars or arrays broadcastable against ``y`` (per-sample
    fading).  Returns ``(x1_hat, x2_hat)`` where ``x2_hat`` is ``None`` for the
    detectors that do not estimate x2.
    """
    kind = DetectorKind.parse(kind)
    y = np.asarray(y, dtype=complex)
    h11 = np.broadcast_to(np.asarray(h11, dtype=complex), y.shape)
    h12 = np.broadcast_to(np.asarray(h12, dtype=complex), y.shape)
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(h11)) and np.all(np.isfinite(h12))):
        raise InvalidInputError("non-finite received samples or gains")

    if kind is DetectorKind.CONVENTIONAL:
        return nearest_batch(s1, h11, y), None

    if kind is DetectorKind.MIN_DISTANCE:
        d = squared_distances(y[..., None, None], combined_points(h11, h12, s1, s2))
        flat = np.argmin(d.reshape(y.shape + (-1,)), axis=-1)
        return flat // s2.order, flat % s2.order

    if kind is DetectorKind.MAX_LIKELIHOOD:
        _check_sigma(noise_sigma)
        return np.argmax(ml_log_metrics(y, h11, h12, s1, s2, noise_sigma), axis=-1), None

    def sic(y, h11, h12):
        l = nearest_batch(s2, h12, y)
        k = nearest_batch(s1, h11, y - h12 * s2.points[l])
        return k, l

    if kind is DetectorKind.SIC:
        return sic(y, h11, h12)

    # ordered SIC: per-sample choice of which component to detect first
    x1_first = np.abs(h11) >= np.abs(h12)
    k_sic, l_sic = sic(y, h11, h12)
    k_dir = nearest_batch(s1, h11, y)
    l_dir = nearest_batch(s2, h12, y - h11 * s1.points[k_dir])
    return np.where(x1_first, k_dir, k_sic), np.where(x1_first, l_dir, l_sic)


def complexity_bounds(kind, M1: int, M2: int) -> int:
    """Worst-case number of distance/metric comparisons for one decision."""
    kind = DetectorKind.parse(kind)
    if kind in (DetectorKind.CONVENTIONAL, DetectorKind.MAX_LIKELIHOOD):
        return M1 - 1
    if kind in (DetectorKind.SIC, DetectorKind.ORDERED_SIC):
        return M1 + M2 - 2
    return M1 * M2 - 1


def metric_evaluation_bound(kind, M1: int, M2: int) -> int:
    """Exponential-metric evaluations per decision (nonzero only for ML)."""
    return M1 * M2 if DetectorKind.parse(kind) is DetectorKind.MAX_LIKELIHOOD else 0


# --- decision regions on the real line --------------------------------------


def _midpoints(values) -> np.ndarray:
    v = np.unique(np.real(np.asarray(values)))
    return (v[:-1] + v[1:]) / 2.0


def _candidate_breaks(kind, h11, h12, s1, s2) -> np.ndarray:
    conv = _midpoints(h11 * s1.points)
    sic = np.concatenate(
        [_midpoints(h12 * s2.points)] + [h12 * np.real(p) + _midpoints(h11 * s1.points) for p in s2.points]
    )
    if kind is DetectorKind.CONVENTIONAL:
        return conv
    if kind is DetectorKind.SIC:
        return sic
    if kind is DetectorKind.ORDERED_SIC:
        if abs(h11) >= abs(h12):
            return conv
        return sic
    return _midpoints(combined_points(h11, h12, s1, s2).ravel())


def _labels_at(kind, ys, h11, h12, s1, s2, noise_sigma) -> np.ndarray:
    return detect_batch(kind, ys, h11, h12, s1, s2, noise_sigma)[0]


def _ml_breaks(h11, h12, s1, s2, noise_sigma, tol=1e-9, chunk=1 << 17) -> list[float]:
    D = max(s1.max_amplitude, s2.max_amplitude)
    R = (abs(h11) + abs(h12)) * D + 6.0 * noise_sigma
    step = noise_sigma / 100.0
    n = int(math.ceil(2 * R / step)) + 1

    def label(v):
        return int(_labels_at(DetectorKind.MAX_LIKELIHOOD, np.array([v]), h11, h12, s1, s2, noise_sigma)[0])

    breaks = []
    prev_y, prev_label = None, None
    for start in range(0, n, chunk):
        ys = -R + step * np.arange(start, min(n, start + chunk))
        labels = _labels_at(DetectorKind.MAX_LIKELIHOOD, ys, h11, h12, s1, s2, noise_sigma)
        if prev_label is not None and labels[0] != prev_label:
            ys = np.concatenate([[prev_y], ys])
            labels = np.concatenate([[prev_label], labels])
        for i in np.flatnonzero(labels[1:] != labels[:-1]):
            lo, hi = float(ys[i]), float(ys[i + 1])
            left = int(labels[i])
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if mid in (lo, hi):
                    break
                if label(mid) == left:
                    lo = mid
                else:
                    hi = mid
            breaks.append(0.5 * (lo + hi))
        prev_y, prev_label = ys[-1], labels[-1]
    return breaks


def decision_regions(kind, h11, h12, s1: Constellation, s2: Constellation, noise_sigma=1.0):
    """Partition of the real line induced by a detector's x1 decision.

    Returns ``(boundaries, labels)`` with ``len(labels) == len(boundaries) + 1``;
    ``labels[i]`` is the x1 index decided on the i-th open interval.
    """
    kind = DetectorKind.parse(kind)
    if not (s1.is_real and s2.is_real):
        raise UnsupportedDomainError("decision regions are only defined for real PAM constellations")
    if np.iscomplexobj(h11) and np.imag(h11) != 0 or np.iscomplexobj(h12) and np.imag(h12) != 0:
        raise UnsupportedDomainError("decision regions require real gains")
    h11, h12 = float(np.real(h11)), float(np.real(h12))
    check_finite(h11, h12)
    if kind is DetectorKind.MAX_LIKELIHOOD:
        _check_sigma(noise_sigma)
        cands = np.asarray(_ml_breaks(h11, h12, s1, s2, noise_sigma))
    else:
        cands = np.unique(_candidate_breaks(kind, h11, h12, s1, s2))
    if cands.size == 0:
        probe = np.array([0.0])
        return [], [int(_labels_at(kind, probe, h11, h12, s1, s2, noise_sigma)[0])]

    inner = (cands[:-1] + cands[1:]) / 2.0
    span = max(1.0, float(np.max(np.abs(cands))))
    probes = np.concatenate([[cands[0] - span], inner, [cands[-1] + span]])
    labels = _labels_at(kind, probes, h11, h12, s1, s2, noise_sigma).tolist()

    boundaries, kept = [], [labels[0]]
    for b, lab in zip(cands.tolist(), labels[1:]):
        if lab != kept[-1]:
            boundaries.append(b)
            kept.append(lab)
    return boundaries, kept


def decision_boundaries(kind, h11, h12, s1: Constellation, s2: Constellation, noise_sigma=1.0) -> list[float]:
    """Sorted points of the real line where the x1 decision changes."""
    return decision_regions(kind, h11, h12, s1, s2, noise_sigma)[0]
