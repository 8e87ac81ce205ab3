"""Tail-operator algebra: property-based over random windows and exponents."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from campanato.dyadic import (DyadicSequence, lemma_bound_check, s_op,
                              scaling_identity_check)


def seqs(min_len=1, max_len=40):
    values = st.lists(st.floats(min_value=0.0, max_value=1e6,
                                allow_nan=False, allow_infinity=False),
                      min_size=min_len, max_size=max_len)
    return st.builds(lambda j, v: DyadicSequence(j, np.array(v)),
                     st.integers(min_value=-20, max_value=20), values)


def test_sequence_rejects_negative_values():
    with pytest.raises(ValueError):
        DyadicSequence(0, np.array([1.0, -0.5]))


def test_sequence_indices():
    X = DyadicSequence(-3, np.ones(5))
    assert list(X.indices) == [-3, -2, -1, 0, 1]


@given(seqs(), st.floats(min_value=-3, max_value=3),
       st.sampled_from([0.5, 1.0, 2.0, np.inf]))
@settings(max_examples=80, deadline=None)
def test_s_op_dominates_input(X, alpha, q):
    # the j-th tail includes the j-th term, so (S X)_j >= X_j
    out = s_op(X, alpha, q)
    assert (out.values >= X.values - 1e-9 * np.maximum(X.values, 1.0)).all()


@given(seqs(), st.floats(min_value=-2, max_value=2),
       st.sampled_from([1.0, 2.0, np.inf]))
@settings(max_examples=60, deadline=None)
def test_s_op_monotone_in_the_sequence(X, alpha, q):
    Y = DyadicSequence(X.j_min, 2.0 * X.values)
    a = s_op(X, alpha, q).values
    b = s_op(Y, alpha, q).values
    assert (b >= a - 1e-12).all()


def test_s_op_closed_form_on_geometric():
    # X_j = 2^{beta j}: (S_{alpha,q} X)_j = X_j (1 - 2^{(beta-alpha)q})^{-1/q}
    # up to the window truncation, largest at the left end
    alpha, beta, q = 1.0, 0.25, 2.0
    j = np.arange(0, 30)
    X = DyadicSequence(0, 2.0 ** (beta * j))
    out = s_op(X, alpha, q)
    expect = X.values[0] * (1 - 2.0 ** ((beta - alpha) * q)) ** (-1.0 / q)
    assert out.values[0] == pytest.approx(expect, rel=1e-4)


def test_s_op_sup_variant_is_running_max():
    X = DyadicSequence(0, np.array([1.0, 4.0, 2.0, 0.5]))
    out = s_op(X, 0.0, np.inf)
    assert out.values.tolist() == [4.0, 4.0, 2.0, 0.5]


@given(seqs(min_len=2), st.floats(min_value=-2, max_value=2),
       st.floats(min_value=-2, max_value=2),
       st.sampled_from([1.0, 2.0, np.inf]))
@settings(max_examples=80, deadline=None)
def test_scaling_identity_exact(X, alpha, beta, q):
    assert scaling_identity_check(X, alpha, beta, q) < 1e-9


@given(seqs(min_len=2),
       st.floats(min_value=0.25, max_value=3.0),
       st.floats(min_value=0.05, max_value=2.0),
       st.floats(min_value=1.0, max_value=2.0),
       st.floats(min_value=0.0, max_value=2.0))
@settings(max_examples=80, deadline=None)
def test_lemma_bound_holds(X, gap, beta, p, q_extra):
    # The constant 1/(1 - 2^{beta-alpha}) is only valid for p >= 1: with
    # X = (0, 1), alpha = 2, beta = 1, p = q = 1/2 the ratio is 2.914 > 2.
    alpha = beta + gap
    q = p + q_extra
    out = lemma_bound_check(X, alpha, beta, p, q)
    assert out["ok"]
    assert out["max_ratio"] <= out["bound"] + 1e-9


def test_lemma_bound_can_fail_below_p_one():
    # Concrete witness that the constant does not extend below p = 1.
    X = DyadicSequence(0, np.array([0.0, 1.0]))
    out = lemma_bound_check(X, 2.0, 1.0, 0.5, 0.5)
    assert out["max_ratio"] > out["bound"]
    assert not out["ok"]


def test_lemma_bound_near_extremal_geometric():
    # X_j = 2^{beta j} with p = 1 meets the bound up to window truncation
    alpha, beta = 1.0, 0.4
    j = np.arange(0, 40)
    X = DyadicSequence(0, 2.0 ** (beta * j))
    out = lemma_bound_check(X, alpha, beta, 1.0, 2.0)
    assert out["max_ratio"] >= 0.9 * out["bound"]


def test_lemma_rejects_bad_exponents():
    X = DyadicSequence(0, np.ones(4))
    with pytest.raises(ValueError):
        lemma_bound_check(X, 1.0, 1.5, 1.0, 2.0)  # beta >= alpha
    with pytest.raises(ValueError):
        lemma_bound_check(X, 1.0, 0.5, 2.0, 1.0)  # p > q
