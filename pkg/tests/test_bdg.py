"""Certified maximal inequalities for discrete sequences and sampled paths."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pwcalc import (
    DiscreteSequence,
    GridSpec,
    PathGeneratorConfig,
    certificate_p,
    certificate_p1,
    certify_path,
    generate,
    lebesgue_sequence,
    qv_at,
)
from pwcalc import bdg

SQ2 = math.sqrt(2.0)

_walks = st.lists(st.floats(-10, 10), min_size=1, max_size=40).map(
    lambda v: np.cumsum(np.asarray(v))
)


def test_discrete_sequence_caches():
    s = DiscreteSequence(np.asarray([0.0, 1.0, 0.0]))
    assert np.array_equal(s.bracket, [0.0, 1.0, 2.0])
    assert np.array_equal(s.abs_max, [0.0, 1.0, 1.0])
    assert len(s) == 3
    with pytest.raises(ValueError):
        DiscreteSequence(np.asarray([np.inf]))
    with pytest.raises(ValueError):
        DiscreteSequence(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        DiscreteSequence(np.asarray([], dtype=float))


def test_bracket_counts_the_initial_value():
    s = DiscreteSequence(np.asarray([2.0, 3.0]))
    assert np.array_equal(s.bracket, [4.0, 5.0])
    assert np.array_equal(s.abs_max, [2.0, 3.0])


def test_p1_certificate_zigzag():
    cert = certificate_p1(np.asarray([0.0, 1.0, 0.0]))
    assert cert.p == 1.0 and cert.cp == 6.0
    assert np.allclose(cert.h, [0.0, 1.0 / SQ2, 0.0], atol=1e-15)
    assert np.allclose(cert.hx, [0.0, 0.0, -1.0 / SQ2], atol=1e-15)
    assert np.array_equal(cert.lhs1, [0.0, 1.0, 1.0])
    assert np.allclose(cert.rhs1, [0.0, 6.0, 5.0 * SQ2], atol=1e-12)
    assert np.allclose(cert.lhs2, [0.0, 1.0, SQ2], atol=1e-15)
    assert np.allclose(cert.rhs2, [0.0, 3.0, 3.0 + 1.0 / SQ2], atol=1e-12)
    assert cert.holds1 and cert.holds2 and cert.holds


def test_p2_certificate_single_step():
    cert = certificate_p(np.asarray([0.0, 1.0]), 2.0)
    assert cert.cp == 36.0
    assert np.allclose(cert.f, [0.0, 2.0 * SQ2], atol=1e-12)
    assert np.allclose(cert.g, [0.0, 2.0 * SQ2], atol=1e-12)
    assert np.array_equal(cert.fx, [0.0, 0.0])
    assert np.array_equal(cert.gx, [0.0, 0.0])
    assert cert.holds


@pytest.mark.parametrize(
    "p,cp", [(1.5, 6.0**1.5 * 0.5**0.5), (2.0, 36.0), (3.0, 864.0)]
)
def test_cp_constant(p, cp):
    cert = certificate_p(np.asarray([0.0, 1.0, -1.0]), p)
    assert cert.cp == pytest.approx(cp, rel=1e-15)


def test_certificate_p_requires_p_above_one():
    with pytest.raises(ValueError):
        certificate_p(np.asarray([0.0, 1.0]), 1.0)
    with pytest.raises(ValueError):
        certificate_p(np.asarray([0.0, 1.0]), 0.5)


def test_degenerate_sequences():
    z = certificate_p1(np.zeros(4))
    assert np.array_equal(z.h, np.zeros(4)) and z.holds
    one = certificate_p1(np.asarray([5.0]))
    assert one.holds and np.array_equal(one.hx, [0.0])
    assert certificate_p(np.asarray([5.0]), 3.0).holds


@given(x=_walks)
@settings(max_examples=80)
def test_p1_holds_on_random_walks(x):
    assert certificate_p1(x).holds


@given(x=_walks, p=st.sampled_from([1.5, 2.0, 3.0]))
@settings(max_examples=80, deadline=None)
def test_p_above_one_holds_on_random_walks(x, p):
    assert certificate_p(x, p).holds


@given(x=_walks, lam=st.floats(0.01, 100))
@settings(max_examples=40)
def test_p1_weights_scale_invariant(x, lam):
    a = certificate_p1(x)
    b = certificate_p1(lam * x)
    assert np.allclose(b.h, a.h, atol=1e-9)


@given(x=_walks, p=st.sampled_from([1.5, 2.0, 3.0]))
@settings(max_examples=30, deadline=None)
def test_dense_and_linear_constructions_agree(x, p):
    s = DiscreteSequence(x)
    fd, gd = bdg._fg_dense(p, s)
    fl, gl = bdg._fg_linear(p, s)
    assert np.allclose(fd, fl, atol=1e-9, rtol=1e-9)
    assert np.allclose(gd, gl, atol=1e-9, rtol=1e-9)


@given(seed=st.integers(0, 30))
@settings(max_examples=15, deadline=None)
def test_certify_path_uses_shifted_stop_values(seed):
    x = generate(PathGeneratorConfig("wiener", step=2.0**-8, seed=seed))
    seq = lebesgue_sequence(x, GridSpec(0.1, 0.0))
    cert = certify_path(x, seq, 1.0)
    assert cert.holds
    s = DiscreteSequence(seq.values - seq.values[0])
    assert np.allclose(s.bracket, qv_at(x, seq, seq.times), atol=1e-12)
    direct = certificate_p1(seq.values - seq.values[0])
    assert np.array_equal(cert.h, direct.h)


def test_certify_path_without_shift():
    x = generate(PathGeneratorConfig("geometric", step=2.0**-6, seed=2))
    seq = lebesgue_sequence(x, GridSpec(0.1, 0.0))
    raw = certify_path(x, seq, 2.0, shift_to_zero=False)
    direct = certificate_p(seq.values, 2.0)
    assert np.array_equal(raw.g, direct.g)
    assert raw.holds
