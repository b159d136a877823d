"""Receiver-1 observation model ``y = h11*x1 + h12*x2 + z``.

Noise is fixed at unit standard deviation per real dimension; SNR and INR are
carried entirely by the gains.  In the complex domain the total noise variance
is therefore 2, and gains are scaled so that ``|h|**2 / 2`` equals the ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError, UnsupportedDomainError


class Domain(str, Enum):
    REAL = "real"
    COMPLEX = "complex"

    @property
    def dims(self) -> int:
        return 1 if self is Domain.REAL else 2


def db_to_linear(db: float) -> float:
    if db == math.inf:
        return math.inf
    if db == -math.inf:
        return 0.0
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    if x == 0:
        return -math.inf
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class LinkBudget:
    """Linear-scale SNR and INR; ``sir`` is derived."""

    snr: float
    inr: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.snr) and self.snr > 0):
            raise ConfigError(f"snr must be positive and finite, got {self.snr}")
        if not (math.isfinite(self.inr) and self.inr >= 0):
            raise ConfigError(f"inr must be nonnegative and finite, got {self.inr}")

    @property
    def sir(self) -> float:
        return math.inf if self.inr == 0 else self.snr / self.inr

    @property
    def snr_db(self) -> float:
        return linear_to_db(self.snr)

    @property
    def inr_db(self) -> float:
        return linear_to_db(self.inr)

    @property
    def sir_db(self) -> float:
        return linear_to_db(self.sir)

    @classmethod
    def from_db(cls, snr_db: float, sir_db: float | None = None, inr_db: float | None = None):
        """Build from dB values; ``inr_db`` wins over ``sir_db`` when both are given.

        ``sir_db = inf`` (or neither given) means no interference.
        """
        snr = db_to_linear(snr_db)
        if inr_db is not None:
            inr = db_to_linear(inr_db)
        elif sir_db is None or sir_db == math.inf:
            inr = 0.0
        else:
            inr = snr / db_to_linear(sir_db)
        return cls(snr, inr)


@dataclass(frozen=True)
class ChannelRealization:
    h11: complex
    h12: complex
    noise_sigma: float = 1.0
    domain: Domain = Domain.REAL

    def __post_init__(self):
        if not self.noise_sigma > 0:
            raise ConfigError("noise_sigma must be positive")
        if self.domain is Domain.REAL and (np.imag(self.h11) != 0 or np.imag(self.h12) != 0):
            raise UnsupportedDomainError("real-domain gains must have zero imaginary part")

    @property
    def total_noise_variance(self) -> float:
        return self.domain.dims * self.noise_sigma**2

    @property
    def snr(self) -> float:
        return abs(self.h11) ** 2 / self.total_noise_variance

    @property
    def inr(self) -> float:
        return abs(self.h12) ** 2 / self.total_noise_variance


def fixed_realization(budget: LinkBudget, domain: Domain = Domain.REAL) -> ChannelRealization:
    """Real nonnegative gains reproducing ``budget`` exactly at unit noise sigma."""
    domain = Domain(domain)
    d = domain.dims
    h11 = math.sqrt(budget.snr * d)
    h12 = math.sqrt(budget.inr * d)
    if domain is Domain.COMPLEX:
        h11, h12 = complex(h11), complex(h12)
    return ChannelRealization(h11, h12, 1.0, domain)


def _crandn(rng: np.random.Generator, size=None):
    shape = (2,) if size is None else (2,) + tuple(np.atleast_1d(size))
    re, im = rng.standard_normal(shape)
    return re + 1j * im


def fading_gains(budget: LinkBudget, rng: np.random.Generator, size: int):
    """Arrays of ``size`` independent Rayleigh gains ``(h11, h12)``.

    Each is circularly-symmetric complex Gaussian with ``E|h11|^2 = 2*SNR`` and
    ``E|h12|^2 = 2*INR``.  With ``INR = 0`` the interference gain is exactly 0.
    """
    h11 = math.sqrt(budget.snr) * _crandn(rng, size)
    if budget.inr == 0:
        h12 = np.zeros(size, dtype=complex)
    else:
        h12 = math.sqrt(budget.inr) * _crandn(rng, size)
    return h11, h12


def fading_realization(
    budget: LinkBudget, rng: np.random.Generator, domain: Domain = Domain.COMPLEX
) -> ChannelRealization:
    """One fresh Rayleigh draw of both gains (complex domain only)."""
    if Domain(domain) is not Domain.COMPLEX:
        raise UnsupportedDomainError("Rayleigh fading is only defined in the complex domain")
    h11, h12 = fading_gains(budget, rng, 1)
    return ChannelRealization(complex(h11[0]), complex(h12[0]), 1.0, Domain.COMPLEX)


def noise(rng: np.random.Generator, size, sigma: float = 1.0, domain: Domain = Domain.REAL):
    if Domain(domain) is Domain.REAL:
        return sigma * rng.standard_normal(size) + 0j
    return sigma * _crandn(rng, size)


def transmit(real: ChannelRealization, x1, x2, rng: np.random.Generator):
    """Received sample(s) ``h11*x1 + h12*x2 + z`` for scalar or array symbols."""
    x1 = np.asarray(x1, dtype=complex)
    x2 = np.asarray(x2, dtype=complex)
    shape = np.broadcast(x1, x2).shape
    y = real.h11 * x1 + real.h12 * x2 + noise(rng, shape or None, real.noise_sigma, real.domain)
    if real.domain is Domain.REAL:
        y = y.real + 0j
    return complex(y) if np.ndim(y) == 0 else y
