"""Quadratic variation and covariation curves with exact stop accounting."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pwcalc import (
    GridSpec,
    PathGeneratorConfig,
    SampledPath,
    evaluate,
    generate,
    lebesgue_sequence,
    merge_error_bound_check,
    qv_at,
    qv_estimate_dyadic,
    simple_qcov,
    simple_qv,
    sup_distance,
)
from pwcalc.quadvar import polarization_qcov, qcov_at, sup_along, write_curve_csv

ZIGZAG3 = SampledPath(np.arange(4.0), np.asarray([0.0, 1.0, 0.0, 1.0]))
LINE01 = SampledPath(np.asarray([0.0, 1.0]), np.asarray([0.0, 1.0]))
UNIT = lebesgue_sequence(ZIGZAG3, GridSpec(1.0, 0.0))


def _wiener(seed, step=2.0**-8):
    return generate(PathGeneratorConfig("wiener", step=step, seed=seed))


def test_qv_unit_grid_zigzag():
    curve = simple_qv(ZIGZAG3, UNIT)
    assert evaluate(curve, 3.0) == 3.0
    assert curve.seq_id == UNIT.label
    # partial increment past the last stop counts quadratically
    at = qv_at(ZIGZAG3, UNIT, np.asarray([0.5, 1.5, 3.0]))
    assert np.array_equal(at, [0.25, 1.25, 3.0])


def test_qv_curve_exact_at_stamps():
    seq = lebesgue_sequence(ZIGZAG3, GridSpec(0.4, 0.0))
    curve = simple_qv(ZIGZAG3, seq)
    assert np.array_equal(curve.values, qv_at(ZIGZAG3, seq, curve.times))


def test_qv_dyadic_line():
    curves = qv_estimate_dyadic(LINE01, 3)
    finals = [float(c.values[-1]) for c in curves]
    assert finals == [1.0, 0.5, 0.25, 0.125]
    assert [c.seq_id for c in curves] == [f"leb:d={2.0**-m:.17g},r=0" for m in range(4)]
    with pytest.raises(ValueError):
        qv_estimate_dyadic(LINE01, -1)


def test_simple_qv_horizon_mismatch():
    short = SampledPath(np.asarray([0.0, 1.0]), np.asarray([0.0, 1.0]))
    with pytest.raises(ValueError):
        simple_qv(short, UNIT)


def test_qcov_zigzag_against_line():
    y = SampledPath(np.asarray([0.0, 3.0]), np.asarray([0.0, 3.0]))
    direct = simple_qcov(ZIGZAG3, y, UNIT)
    assert evaluate(direct, 3.0) == 1.0
    assert qcov_at(ZIGZAG3, y, UNIT, np.asarray([1.5]))[0] == 0.75
    pol = polarization_qcov(ZIGZAG3, y, UNIT)
    assert sup_distance(direct, pol) <= 1e-12


@given(seed=st.integers(0, 30))
@settings(max_examples=20, deadline=None)
def test_qcov_diagonal_is_qv(seed):
    x = _wiener(seed)
    seq = lebesgue_sequence(x, GridSpec(0.1, 0.0))
    assert sup_distance(simple_qcov(x, x, seq), simple_qv(x, seq)) <= 1e-12


@given(seed=st.integers(0, 30), d=st.floats(0.05, 0.3))
@settings(max_examples=20, deadline=None)
def test_polarization_identity(seed, d):
    x = _wiener(seed)
    y = _wiener(seed + 1000)
    seq = lebesgue_sequence(x, GridSpec(d, 0.0))
    gap = sup_distance(simple_qcov(x, y, seq), polarization_qcov(x, y, seq))
    assert gap <= 1e-10


def test_sup_along_tracks_running_max():
    seq = lebesgue_sequence(ZIGZAG3, GridSpec(0.4, 0.0))
    assert sup_along(seq, ZIGZAG3, 3.0) == 1.0
    assert sup_along(seq, ZIGZAG3, 0.9) == pytest.approx(0.9, abs=1e-15)


def test_merge_error_bound_zigzag_and_wiener():
    x = _wiener(3)
    sigma = lebesgue_sequence(x, GridSpec(0.05, 0.0))
    tau = lebesgue_sequence(x, GridSpec(0.07, 0.013))
    rep = merge_error_bound_check(x, sigma, tau, 0.1)
    assert rep.holds
    assert rep.lhs <= rep.rhs + 1e-9 * (1.0 + abs(rep.rhs))


def test_merge_error_bound_rejects_coarse_cover():
    x = _wiener(3)
    sigma = lebesgue_sequence(x, GridSpec(0.05, 0.0))
    with pytest.raises(ValueError):
        merge_error_bound_check(x, sigma, sigma, 0.001)


@given(
    seed=st.integers(0, 40),
    d=st.floats(0.03, 0.15),
    dp=st.floats(0.02, 0.3),
    off=st.floats(0.0, 0.99),
)
@settings(max_examples=30, deadline=None)
def test_merge_error_bound_property(seed, d, dp, off):
    x = _wiener(seed)
    sigma = lebesgue_sequence(x, GridSpec(d, 0.0))
    tau = lebesgue_sequence(x, GridSpec(dp, off * dp))
    assert merge_error_bound_check(x, sigma, tau, 2.0 * d).holds


def test_sup_distance_checks_all_stamps():
    a = SampledPath(np.asarray([0.0, 1.0]), np.asarray([0.0, 1.0]))
    b = SampledPath(np.asarray([0.0, 0.5, 1.0]), np.asarray([0.0, 1.0, 0.0]))
    assert sup_distance(a, b) == 1.0
    with pytest.raises(ValueError):
        sup_distance(a, SampledPath(np.asarray([0.0, 2.0]), np.zeros(2)))


def test_write_curve_csv(tmp_path):
    curve = simple_qv(ZIGZAG3, UNIT)
    f = tmp_path / "curve.csv"
    write_curve_csv(curve, str(f))
    lines = f.read_text().strip().splitlines()
    assert lines[0] == "t,qv"
    assert len(lines) == len(curve) + 1
