"""Symbol detection for the two-user Gaussian interference channel."""

from .analytic import (
    SerPrediction,
    q_function,
    ser_exact_pam,
    ser_nnub_2pam,
    sic_floor_region,
    sir_threshold,
)
from .channel import (
    ChannelRealization,
    Domain,
    LinkBudget,
    db_to_linear,
    fading_realization,
    fixed_realization,
    linear_to_db,
    transmit,
)
from .constellation import Constellation, ConstellationKind, make_constellation, make_pam, make_qam, nearest
from .detectors import (
    Decision,
    DetectorKind,
    complexity_bounds,
    decision_boundaries,
    decision_regions,
    detect,
    detect_batch,
    detect_conventional,
    detect_min_distance,
    detect_ml,
    detect_ordered_sic,
    detect_sic,
    metric_evaluation_bound,
)
from .estimator import InterferenceDetector
from .montecarlo import SerEstimate, SweepConfig, run_point, run_sweep

__version__ = "0.1.0"
