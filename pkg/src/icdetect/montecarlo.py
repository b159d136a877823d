"""Seeded Monte Carlo SER estimation over (SNR, SIR) grids.

Every grid point draws from its own Philox stream, keyed by
``(seed, detector ordinal, snr index, sir index)`` through
:class:`numpy.random.SeedSequence`.  Results therefore do not depend on the
order in which points are evaluated or on the number of worker processes.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import Domain, LinkBudget, fading_gains, fixed_realization, noise
from .constellation import make_constellation
from .detectors import DetectorKind, detect_batch
from .errors import ConfigError, IcDetectError

logger = logging.getLogger(__name__)

CHUNK = 1 << 14
DEFAULT_MIN_ERRORS = 100
DEFAULT_TRIALS_MAX = 10_000_000


@dataclass(frozen=True)
class SweepConfig:
    """Grid and stopping rule for a simulation run.

    ``inr_db_list``, when given, replaces ``sir_db_list`` as the interference
    axis (SIR is then derived per point).  ``min_errors = 0`` disables early
    stopping.
    """

    mod1: str = "pam2"
    mod2: str = "pam2"
    detectors: tuple = (DetectorKind.MIN_DISTANCE,)
    snr_db_grid: tuple = (10.0,)
    sir_db_list: tuple = (math.inf,)
    fading: bool = False
    trials_max: int = DEFAULT_TRIALS_MAX
    min_errors: int = DEFAULT_MIN_ERRORS
    seed: int = 0
    inr_db_list: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "detectors", tuple(DetectorKind.parse(d) for d in self.detectors))
        object.__setattr__(self, "snr_db_grid", tuple(float(v) for v in self.snr_db_grid))
        object.__setattr__(self, "sir_db_list", tuple(float(v) for v in self.sir_db_list))
        if self.inr_db_list is not None:
            object.__setattr__(self, "inr_db_list", tuple(float(v) for v in self.inr_db_list))
        self.validate()

    def validate(self):
        try:
            self.constellations()
        except IcDetectError as exc:
            raise ConfigError(str(exc)) from exc
        if not self.detectors:
            raise ConfigError("at least one detector is required")
        if not self.snr_db_grid or not self.interference_axis:
            raise ConfigError("SNR and SIR/INR grids must be non-empty")
        if int(self.trials_max) < 1:
            raise ConfigError("trials_max must be >= 1")
        if int(self.min_errors) < 0:
            raise ConfigError("min_errors must be >= 0")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if any(not math.isfinite(v) for v in self.snr_db_grid):
            raise ConfigError("SNR grid values must be finite")

    @property
    def interference_axis(self) -> tuple:
        return self.inr_db_list if self.inr_db_list is not None else self.sir_db_list

    def constellations(self):
        return make_constellation(self.mod1), make_constellation(self.mod2)

    @property
    def domain(self) -> Domain:
        s1, s2 = self.constellations()
        if self.fading or not (s1.is_real and s2.is_real):
            return Domain.COMPLEX
        return Domain.REAL

    def points(self):
        """Grid points ``(detector, snr index, axis index)`` in output order."""
        for det in self.detectors:
            for i in range(len(self.snr_db_grid)):
                for j in range(len(self.interference_axis)):
                    yield det, i, j


@dataclass(frozen=True)
class SerEstimate:
    detector: DetectorKind
    snr_db: float
    sir_db: float
    inr_db: float
    trials: int
    errors: int
    mod1: str = field(default="pam2", compare=False)
    mod2: str = field(default="pam2", compare=False)
    fading: bool = field(default=False, compare=False)

    @property
    def ser(self) -> float:
        return self.errors / self.trials if self.trials else 0.0

    @property
    def ci95_halfwidth(self) -> float:
        if not self.trials:
            return math.inf
        p = self.ser
        return 1.96 * math.sqrt(p * (1.0 - p) / self.trials)


def point_rng(seed: int, detector, snr_index: int, axis_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(DetectorKind.parse(detector).ordinal, snr_index, axis_index))
    return np.random.Generator(np.random.Philox(ss))


def run_point(config: SweepConfig, detector, snr_db: float, sir_db: float, rng_stream: np.random.Generator,
              inr_db: float | None = None) -> SerEstimate:
    """Estimate the SER of one detector at one (SNR, SIR) point.

    Symbols are i.i.d. equiprobable.  Fixed gains are set once; under fading each
    symbol gets fresh gains.  Stops at ``trials_max`` trials or on the trial that
    brings the error count to ``min_errors``.
    """
    detector = DetectorKind.parse(detector)
    if detector not in config.detectors:
        raise ConfigError(f"detector {detector.value} is not part of the configuration")
    s1, s2 = config.constellations()
    domain = config.domain
    budget = LinkBudget.from_db(snr_db, sir_db=sir_db, inr_db=inr_db)

    if not config.fading:
        real = fixed_realization(budget, domain)
        fixed_h11, fixed_h12 = real.h11, real.h12
    trials_max, min_errors = int(config.trials_max), int(config.min_errors)

    trials = errors = 0
    while trials < trials_max and (min_errors == 0 or errors < min_errors):
        n = min(CHUNK, trials_max - trials)
        i1 = rng_stream.integers(s1.order, size=n)
        i2 = rng_stream.integers(s2.order, size=n)
        if config.fading:
            h11, h12 = fading_gains(budget, rng_stream, n)
        else:
            h11, h12 = fixed_h11, fixed_h12
        y = h11 * s1.points[i1] + h12 * s2.points[i2] + noise(rng_stream, n, 1.0, domain)
        if domain is Domain.REAL:
            y = y.real
        x1_hat, _ = detect_batch(detector, y, h11, h12, s1, s2, 1.0)
        wrong = x1_hat != i1
        if min_errors and errors + int(wrong.sum()) >= min_errors:
            cut = int(np.searchsorted(np.cumsum(wrong), min_errors - errors))
            trials += cut + 1
            errors = min_errors
            break
        trials += n
        errors += int(wrong.sum())

    if inr_db is None:
        sir_db = float(sir_db)
        inr_db = float(snr_db) - sir_db
    else:
        inr_db = float(inr_db)
        sir_db = float(snr_db) - inr_db
    return SerEstimate(
        detector=detector,
        snr_db=float(snr_db),
        sir_db=sir_db,
        inr_db=inr_db,
        trials=trials,
        errors=errors,
        mod1=config.mod1,
        mod2=config.mod2,
        fading=bool(config.fading),
    )


def _run_indexed(args) -> SerEstimate:
    config, det, i, j = args
    snr_db = config.snr_db_grid[i]
    rng = point_rng(config.seed, det, i, j)
    if config.inr_db_list is not None:
        return run_point(config, det, snr_db, math.nan, rng, inr_db=config.inr_db_list[j])
    return run_point(config, det, snr_db, config.sir_db_list[j], rng)


def run_sweep(config: SweepConfig, workers: int = 1, progress=None) -> list[SerEstimate]:
    """Evaluate every ``detector x SNR x SIR`` point, in that product order.

    ``progress`` is called as ``progress(done, total, estimate)`` after each point.
    """
    jobs = [(config, det, i, j) for det, i, j in config.points()]
    total = len(jobs)
    results = []
    if workers <= 1 or total == 1:
        it = map(_run_indexed, jobs)
        pool = None
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        it = pool.map(_run_indexed, jobs)
    try:
        for done, est in enumerate(it, 1):
            results.append(est)
            logger.debug("point %d/%d: %s", done, total, est)
            if progress is not None:
                progress(done, total, est)
    finally:
        if pool is not None:
            pool.shutdown()
    return results
