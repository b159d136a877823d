"""PAM / square-QAM alphabets with unit average energy and a nearest-point slicer."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidInputError, InvalidOrderError


class ConstellationKind(str, Enum):
    PAM = "pam"
    QAM = "qam"


@dataclass(frozen=True)
class Constellation:
    """Ordered finite alphabet, indexed ``0..M-1``.

    ``points`` is a read-only complex array; PAM points have zero imaginary part
    and are sorted in increasing order.
    """

    kind: ConstellationKind
    order: int
    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=complex)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.order

    @property
    def name(self) -> str:
        return f"{self.kind.value}{self.order}"

    @property
    def is_real(self) -> bool:
        return self.kind is ConstellationKind.PAM

    @property
    def max_amplitude(self) -> float:
        return float(np.max(np.abs(self.points)))

    def __eq__(self, other):
        if not isinstance(other, Constellation):
            return NotImplemented
        return (self.kind, self.order) == (other.kind, other.order) and np.array_equal(
            self.points, other.points
        )

    def __hash__(self):
        return hash((self.kind, self.order))


def _pam_levels(M: int) -> np.ndarray:
    return np.arange(-(M - 1), M, 2, dtype=float)


def make_pam(M: int) -> Constellation:
    """M-PAM: ``{±1, ±3, ..., ±(M-1)}`` scaled to unit mean energy."""
    if not isinstance(M, (int, np.integer)) or M < 2:
        raise InvalidOrderError(f"PAM order must be an integer >= 2, got {M!r}")
    M = int(M)
    levels = _pam_levels(M) / math.sqrt((M * M - 1) / 3.0)
    return Constellation(ConstellationKind.PAM, M, levels.astype(complex))


def make_qam(M: int) -> Constellation:
    """Square M-QAM as the product of two sqrt(M)-PAM rails.

    Point ``k = i*L + q`` has in-phase level ``i`` and quadrature level ``q``.
    """
    if not isinstance(M, (int, np.integer)) or M < 4:
        raise InvalidOrderError(f"QAM order must be a perfect square >= 4, got {M!r}")
    M = int(M)
    L = math.isqrt(M)
    if L * L != M:
        raise InvalidOrderError(f"QAM order must be a perfect square, got {M}")
    rail = _pam_levels(L)
    pts = (rail[:, None] + 1j * rail[None, :]).ravel()
    pts = pts / math.sqrt(np.mean(np.abs(pts) ** 2))
    return Constellation(ConstellationKind.QAM, M, pts)


_SPEC_RE = re.compile(r"^(pam|qam)(\d+)$")


def make_constellation(spec: str) -> Constellation:
    """Build a constellation from a short name such as ``"pam4"`` or ``"qam16"``."""
    m = _SPEC_RE.match(str(spec).strip().lower())
    if m is None:
        raise InvalidOrderError(f"unknown modulation {spec!r}; expected e.g. 'pam2' or 'qam4'")
    kind, order = m.group(1), int(m.group(2))
    return make_pam(order) if kind == "pam" else make_qam(order)


def check_finite(*values) -> None:
    for v in values:
        arr = np.asarray(v)
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError(f"non-finite input: {v!r}")


def squared_distances(y, candidates) -> np.ndarray:
    """``|y - c|**2`` broadcast over arrays, without the square root."""
    d = np.asarray(y) - np.asarray(candidates)
    return d.real * d.real + d.imag * d.imag


def argmin_scan(values) -> tuple[int, int]:
    """Linear scan for the smallest value; first index wins ties.

    Returns ``(index, comparisons)``.
    """
    values = list(values)
    best, best_val = 0, values[0]
    comparisons = 0
    for k in range(1, len(values)):
        comparisons += 1
        if values[k] < best_val:
            best, best_val = k, values[k]
    return best, comparisons


def nearest(c: Constellation, gain: complex, y: complex) -> tuple[int, int]:
    """Index of the point of ``gain * c.points`` closest to ``y``.

    Returns ``(index, comparisons)``; ties go to the smallest index.
    """
    check_finite(gain, y)
    return argmin_scan(squared_distances(complex(y), complex(gain) * c.points).tolist())


def nearest_batch(c: Constellation, gain, y) -> np.ndarray:
    """Vectorized :func:`nearest` over arrays of ``y`` (and optionally ``gain``)."""
    y = np.asarray(y)
    gain = np.asarray(gain)
    scaled = gain[..., None] * c.points
    return np.argmin(squared_distances(y[..., None], scaled), axis=-1)
