"""Closed-form SER approximations, error-floor thresholds and an exact-SER oracle.

The NNUB expressions cover 2-PAM at both transmitters only.  For general PAM
the exact SER is obtained by integrating the Gaussian noise density over the
detector's decision regions, which are piecewise intervals of the real line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .channel import Domain, LinkBudget, fixed_realization
from .constellation import make_pam
from .detectors import DetectorKind, decision_regions
from .errors import InvalidInputError, InvalidOrderError, UnsupportedKindError


def q_function(x):
    """Standard Gaussian tail probability ``P(N(0,1) > x)``."""
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)):
        raise InvalidInputError("q_function argument is NaN")
    out = 0.5 * erfc(x / math.sqrt(2.0))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SerPrediction:
    value: float
    regime: str
    floor: float


# Each branch is (lower SIR bound inclusive, label, const, coef, a, b) and evaluates
# const + coef * Q(a*sqrt(SNR) + b*sqrt(INR)).  Branches are listed from the
# highest SIR down; the first whose bound is met applies.
_NNUB_BRANCHES = {
    DetectorKind.CONVENTIONAL: [
        (1.0, "SIR >= 1", 0.0, 0.5, 1.0, -1.0),
        (0.0, "SIR < 1", 0.5, -0.5, -1.0, 1.0),
    ],
    DetectorKind.SIC: [
        (4.0, "SIR >= 4", 0.0, 0.5, 1.0, -2.0),
        (9.0 / 4.0, "9/4 <= SIR < 4", 0.5, -0.5, 1.0, -1.0),
        (1.0, "1 <= SIR < 9/4", 0.5, -0.5, -1.0, 2.0),
        (0.25, "1/4 <= SIR < 1", 0.0, 0.5, -1.0, 1.0),
        (0.0, "SIR < 1/4", 0.0, 1.0, 1.0, 0.0),
    ],
    DetectorKind.MIN_DISTANCE: [
        (1.0, "SIR >= 1", 0.0, 0.5, 1.0, -1.0),
        (0.25, "1/4 <= SIR < 1", 0.0, 0.5, -1.0, 1.0),
        (0.0, "SIR < 1/4", 0.0, 1.0, 1.0, 0.0),
    ],
}


def nnub_branch_edges(kind) -> list[float]:
    """SIR values (linear) where the 2-PAM NNUB formula switches branch."""
    kind = DetectorKind.parse(kind)
    if kind not in _NNUB_BRANCHES:
        raise UnsupportedKindError(f"no closed-form NNUB for {kind.name}")
    return sorted(b[0] for b in _NNUB_BRANCHES[kind] if b[0] > 0)


def _select_branch(kind, sir):
    for branch in _NNUB_BRANCHES[kind]:
        if sir >= branch[0]:
            return branch
    raise AssertionError("unreachable: last branch has bound 0")


def ser_nnub_2pam(kind, snr: float, inr: float) -> SerPrediction:
    """NNUB SER approximation for 2-PAM at both transmitters.

    The floor is the SNR -> infinity limit of the active branch at fixed SIR.
    """
    kind = DetectorKind.parse(kind)
    if kind not in _NNUB_BRANCHES:
        raise UnsupportedKindError(f"no closed-form NNUB for {kind.name}")
    budget = LinkBudget(snr, inr)
    sir = budget.sir
    _, label, const, coef, a, b = _select_branch(kind, sir)
    value = const + coef * q_function(a * math.sqrt(snr) + b * math.sqrt(inr))

    # sign of the Q argument once both ratios grow at fixed SIR
    slope = a if sir == math.inf else a + b / math.sqrt(sir)
    if abs(slope) < 1e-12:
        q_limit = 0.5
    else:
        q_limit = 0.0 if slope > 0 else 1.0
    floor = const + coef * q_limit
    return SerPrediction(min(1.0, max(0.0, value)), label, min(1.0, max(0.0, floor)))


def _check_orders(M1, M2):
    for M in (M1, M2):
        if not isinstance(M, (int, np.integer)) or M < 2:
            raise InvalidOrderError(f"constellation orders must be integers >= 2, got {M1}, {M2}")


def sir_threshold(M1: int, M2: int) -> float:
    """SIR above which the conventional detector has no error floor (PAM)."""
    _check_orders(M1, M2)
    return (M1 * M1 - 1) * (M2 - 1) / (M2 + 1)


def sic_floor_region(M1: int, M2: int) -> tuple[float, float]:
    """``(sir1, sir2)`` bracketing the SIR range where SIC floors (PAM)."""
    _check_orders(M1, M2)
    sir1 = (M1 + 1) / ((M1 - 1) * (M2 * M2 - 1))
    return sir1, 4.0 * sir_threshold(M1, M2)


def _interval_mass(lo, hi, mean, sigma) -> float:
    """``P(lo < mean + sigma*N < hi)`` without cancellation in either tail."""
    u = (lo - mean) / sigma
    v = (hi - mean) / sigma
    if u >= 0:
        return q_function(u) - q_function(v)
    if v <= 0:
        return q_function(-v) - q_function(-u)
    return 1.0 - q_function(-u) - q_function(v)


def ser_exact_pam(kind, snr: float, inr: float, M1: int = 2, M2: int = 2, noise_sigma_for_ml=None) -> float:
    """Exact SER of a detector for M1-PAM / M2-PAM with fixed real gains.

    ``noise_sigma_for_ml`` sets the sigma assumed by the ML metric (defaults to
    the true noise sigma, i.e. a matched detector).
    """
    kind = DetectorKind.parse(kind)
    _check_orders(M1, M2)
    s1, s2 = make_pam(M1), make_pam(M2)
    real = fixed_realization(LinkBudget(snr, inr), Domain.REAL)
    sigma = real.noise_sigma
    ml_sigma = sigma if noise_sigma_for_ml is None else noise_sigma_for_ml
    h11, h12 = float(real.h11), float(real.h12)
    bounds, labels = decision_regions(kind, h11, h12, s1, s2, ml_sigma)
    edges = [-math.inf] + list(bounds) + [math.inf]

    total = 0.0
    for k, p1 in enumerate(s1.points.real):
        for p2 in s2.points.real:
            mean = h11 * p1 + h12 * p2
            for lo, hi, lab in zip(edges[:-1], edges[1:], labels):
                if lab != k:
                    total += _interval_mass(lo, hi, mean, sigma)
    return min(1.0, max(0.0, total / (M1 * M2)))
