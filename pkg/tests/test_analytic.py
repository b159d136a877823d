import math

import numpy as np
import pytest
from scipy.integrate import quad

from icdetect import (
    DetectorKind,
    LinkBudget,
    db_to_linear,
    detect_batch,
    fixed_realization,
    make_pam,
    q_function,
    ser_exact_pam,
    ser_nnub_2pam,
    sic_floor_region,
    sir_threshold,
)
from icdetect.analytic import nnub_branch_edges
from icdetect.errors import InvalidInputError, InvalidOrderError, UnsupportedKindError

KINDS = list(DetectorKind)
NNUB_KINDS = [DetectorKind.CONVENTIONAL, DetectorKind.SIC, DetectorKind.MIN_DISTANCE]


def Q(x):
    return q_function(x)


# --- Q function --------------------------------------------------------------


def _q_quad(x):
    val, _ = quad(lambda t: math.exp(-t * t / 2) / math.sqrt(2 * math.pi), x, math.inf, epsabs=0, epsrel=1e-13)
    return val


def test_q_zero():
    assert q_function(0.0) == 0.5


def test_q_one_matches_quadrature():
    # frozen from adaptive quadrature of the tail integral
    assert q_function(1.0) == pytest.approx(0.15865525393145707, rel=1e-12)


@pytest.mark.parametrize("x", [0.1, 0.7, 1.9, 3.3, 5.0, 7.9])
def test_q_relative_accuracy(x):
    assert q_function(x) == pytest.approx(_q_quad(x), rel=1e-12)


@pytest.mark.parametrize("x", [0.0, 0.25, 1.0, 2.5, 6.0, 8.0])
def test_q_complement(x):
    assert q_function(x) + q_function(-x) == pytest.approx(1.0, abs=1e-15)


def test_q_far_tail_and_nan():
    assert 0 <= q_function(40.0) < 1e-300
    assert q_function(-40.0) == 1.0
    with pytest.raises(InvalidInputError):
        q_function(math.nan)


# --- NNUB -----------------------------------------------------------------------


def test_nnub_conventional_strong_signal():
    snr, inr = 10.0, 10.0 / db_to_linear(3.0)
    p = ser_nnub_2pam(DetectorKind.CONVENTIONAL, snr, inr)
    assert p.value == pytest.approx(0.5 * Q(math.sqrt(snr) - math.sqrt(inr)), rel=1e-15)
    assert p.regime == "SIR >= 1" and p.floor == 0.0


def test_nnub_very_strong_interference():
    snr, inr = 10.0, 100.0
    md = ser_nnub_2pam(DetectorKind.MIN_DISTANCE, snr, inr)
    sic = ser_nnub_2pam(DetectorKind.SIC, snr, inr)
    assert md.value == sic.value == pytest.approx(Q(math.sqrt(snr)), rel=1e-15)
    assert md.regime == "SIR < 1/4"


def test_nnub_conventional_floor_half():
    p = ser_nnub_2pam(DetectorKind.CONVENTIONAL, 1e4, 2e4)
    assert p.floor == 0.5
    assert p.regime == "SIR < 1"


def test_nnub_sic_floor_region():
    assert ser_nnub_2pam(DetectorKind.SIC, 1e4, 1e4 / 3).floor == 0.5
    assert ser_nnub_2pam(DetectorKind.SIC, 1e4, 1e4 / 2).floor == 0.5
    assert ser_nnub_2pam(DetectorKind.SIC, 1e4, 1e4 / 5).floor == 0.0
    assert ser_nnub_2pam(DetectorKind.SIC, 1e4, 1e4 / 0.5).floor == 0.0


def test_nnub_no_interference():
    p = ser_nnub_2pam(DetectorKind.CONVENTIONAL, 9.0, 0.0)
    assert p.value == pytest.approx(0.5 * Q(3.0))
    assert p.regime == "SIR >= 1"


@pytest.mark.parametrize("kind", [DetectorKind.ORDERED_SIC, DetectorKind.MAX_LIKELIHOOD])
def test_nnub_unsupported(kind):
    with pytest.raises(UnsupportedKindError):
        ser_nnub_2pam(kind, 10.0, 1.0)


@pytest.mark.parametrize("kind", NNUB_KINDS)
def test_nnub_branches_partition_sir(kind):
    edges = nnub_branch_edges(kind)
    sirs = np.concatenate([np.logspace(-4, 4, 2001), edges, np.nextafter(edges, 0)])
    seen = {}
    for sir in sirs:
        regime = ser_nnub_2pam(kind, 10.0, 10.0 / sir).regime
        seen.setdefault(regime, []).append(sir)
    # every SIR maps to one regime, each regime is a contiguous interval
    ranges = sorted((min(v), max(v)) for v in seen.values())
    for (_, hi), (lo, _) in zip(ranges[:-1], ranges[1:]):
        assert hi < lo
    assert len(seen) == len(edges) + 1


@pytest.mark.parametrize("snr_db", [0, 5, 10, 20, 30])
@pytest.mark.parametrize("sir", [1.0, 1.5, 2.25, 3.9, 10.0, 100.0])
def test_nnub_conv_equals_md_and_md_beats_sic_above_unit_sir(snr_db, sir):
    snr = db_to_linear(snr_db)
    conv = ser_nnub_2pam(DetectorKind.CONVENTIONAL, snr, snr / sir).value
    md = ser_nnub_2pam(DetectorKind.MIN_DISTANCE, snr, snr / sir).value
    sic = ser_nnub_2pam(DetectorKind.SIC, snr, snr / sir).value
    assert conv == md
    assert md <= sic


# --- thresholds -------------------------------------------------------------------


def test_sir_threshold_values():
    assert sir_threshold(2, 2) == 1.0
    assert sir_threshold(4, 4) == 9.0
    assert 10 * math.log10(sir_threshold(4, 4)) == pytest.approx(9.54, abs=0.005)
    assert sir_threshold(2, 4) == pytest.approx(1.8)


def test_sic_floor_region_values():
    assert sic_floor_region(2, 2) == (1.0, 4.0)
    sir1, sir2 = sic_floor_region(4, 4)
    assert sir1 == pytest.approx(1 / 9)
    assert 10 * math.log10(sir1) == pytest.approx(-9.54, abs=0.005)
    assert sir2 == 36.0 == 4 * sir_threshold(4, 4)


@pytest.mark.parametrize("m1,m2", [(1, 2), (2, 0), (2.5, 2)])
def test_threshold_invalid_orders(m1, m2):
    with pytest.raises(InvalidOrderError):
        sir_threshold(m1, m2)
    with pytest.raises(InvalidOrderError):
        sic_floor_region(m1, m2)


# --- exact SER oracle ------------------------------------------------------------------


def test_exact_single_user():
    for snr in (0.5, 3.0, 10.0, 30.0):
        assert ser_exact_pam(DetectorKind.CONVENTIONAL, snr, 0.0) == pytest.approx(Q(math.sqrt(snr)), rel=1e-12)


@pytest.mark.parametrize("sir_db", [-6, -3, -1, 1, 3, 8])
def test_exact_conventional_closed_form(sir_db):
    snr = 10.0
    inr = snr / db_to_linear(sir_db)
    a, b = math.sqrt(snr), math.sqrt(inr)
    expected = 0.5 * (Q(a + b) + Q(a - b))
    assert ser_exact_pam(DetectorKind.CONVENTIONAL, snr, inr) == pytest.approx(expected, rel=1e-12)


def _ser_by_grid_integration(kind, snr, inr, M1, M2, step=2e-4):
    """Numerically integrate the error indicator against the Gaussian density."""
    s1, s2 = make_pam(M1), make_pam(M2)
    r = fixed_realization(LinkBudget(snr, inr))
    total = 0.0
    for k, p in enumerate(s1.points.real):
        for q in s2.points.real:
            mean = r.h11 * p + r.h12 * q
            ys = mean + np.arange(-12, 12, step) + step / 2
            wrong = detect_batch(kind, ys, r.h11, r.h12, s1, s2, 1.0)[0] != k
            dens = np.exp(-((ys - mean) ** 2) / 2) / math.sqrt(2 * math.pi)
            total += np.sum(dens[wrong]) * step
    return total / (M1 * M2)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("snr,inr,m1,m2", [(4.0, 6.0, 2, 2), (10.0, 3.0, 2, 2), (30.0, 50.0, 4, 4), (20.0, 2.0, 4, 2)])
def test_exact_matches_grid_integration(kind, snr, inr, m1, m2):
    exact = ser_exact_pam(kind, snr, inr, m1, m2)
    assert exact == pytest.approx(_ser_by_grid_integration(kind, snr, inr, m1, m2), abs=2e-4)


def test_exact_md_matches_monte_carlo():
    snr = 10.0
    inr = snr / db_to_linear(-3.0)
    exact = ser_exact_pam(DetectorKind.MIN_DISTANCE, snr, inr)
    rng = np.random.default_rng(123)
    r = fixed_realization(LinkBudget(snr, inr))
    s = make_pam(2)
    n, errors = 10**7, 0
    for _ in range(10):
        m = n // 10
        i1, i2 = rng.integers(2, size=m), rng.integers(2, size=m)
        y = r.h11 * s.points.real[i1] + r.h12 * s.points.real[i2] + rng.standard_normal(m)
        errors += int(np.sum(detect_batch(DetectorKind.MIN_DISTANCE, y, r.h11, r.h12, s, s)[0] != i1))
    p = errors / n
    assert abs(p - exact) <= 3 * math.sqrt(exact * (1 - exact) / n)


def test_exact_conventional_floor():
    snr = db_to_linear(40.0)
    assert ser_exact_pam(DetectorKind.CONVENTIONAL, snr, 2 * snr) == pytest.approx(0.5, abs=1e-6)
    assert ser_nnub_2pam(DetectorKind.CONVENTIONAL, snr, 2 * snr).floor == 0.5


def test_exact_ml_mismatched_sigma_is_not_better():
    snr, inr = db_to_linear(2.0), db_to_linear(3.0)
    matched = ser_exact_pam(DetectorKind.MAX_LIKELIHOOD, snr, inr)
    mismatched = ser_exact_pam(DetectorKind.MAX_LIKELIHOOD, snr, inr, noise_sigma_for_ml=0.2)
    assert matched <= mismatched + 1e-9


# --- paper-level properties ------------------------------------------------------------


@pytest.mark.parametrize("m1,m2", [(2, 2), (4, 4), (2, 4), (4, 2)])
def test_proposition_one(m1, m2):
    th = sir_threshold(m1, m2)
    snr = db_to_linear(60.0)
    above = th * db_to_linear(2.5)
    assert ser_exact_pam(DetectorKind.CONVENTIONAL, snr, snr / above, m1, m2) < 1e-6
    for sir in (th / db_to_linear(2.3), th / db_to_linear(5.1)):
        assert ser_exact_pam(DetectorKind.CONVENTIONAL, snr, snr / sir, m1, m2) > 1e-2
        assert ser_exact_pam(DetectorKind.MIN_DISTANCE, snr, snr / sir, m1, m2) < 1e-6


def test_proposition_one_conventional_decays_above_threshold():
    sir = 12.0
    vals = [ser_exact_pam(DetectorKind.CONVENTIONAL, db_to_linear(s), db_to_linear(s) / sir, 4, 4)
            for s in (20, 30, 40, 50)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("m1,m2", [(2, 2), (4, 4)])
def test_sic_floor_inside_region(m1, m2):
    sir1, sir2 = sic_floor_region(m1, m2)
    snr = db_to_linear(60.0)
    sir = math.sqrt(sir1 * sir2) * 1.037
    assert ser_exact_pam(DetectorKind.SIC, snr, snr / sir, m1, m2) > 1e-2


@pytest.mark.parametrize("snr_db", [0, 3, 8])
@pytest.mark.parametrize("sir_db", [-6, -1, 2, 7])
@pytest.mark.parametrize("m", [2, 4])
def test_ml_is_optimal(snr_db, sir_db, m):
    snr = db_to_linear(snr_db)
    inr = snr / db_to_linear(sir_db)
    ml = ser_exact_pam(DetectorKind.MAX_LIKELIHOOD, snr, inr, m, m)
    for kind in KINDS:
        assert ml <= ser_exact_pam(kind, snr, inr, m, m) + 1e-9
