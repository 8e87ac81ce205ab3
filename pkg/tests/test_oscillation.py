"""Oscillation values against closed forms and brute-force fits."""

import numpy as np
import pytest

from campanato.fields import build_field
from campanato.oscillation import (DyadicProfile, OscParams, osc, osc_fit,
                                   osc_profile, profile_batch)
from campanato.polynomials import Polynomial


def test_quadratic_degree1_closed_form():
    # min over (a, b) of (1/2) int_{-1}^{1} (x^2 - a - b x)^2 dx is attained
    # at a = 1/3, b = 0 with value 4/45, so osc = 2/(3 sqrt 5)
    f = build_field("quadratic")
    val = osc(f, OscParams(p=2.0, degree=1), np.zeros(1), 1.0)
    assert val == pytest.approx(2.0 / (3.0 * np.sqrt(5.0)), abs=1e-9)


def test_linear_degree0_closed_form():
    # best constant for a x on B(x0, r) is a x0; residual |a| r / sqrt(3)
    f = build_field("linear", a=2.0)
    for x0, r in ((0.0, 1.0), (1.5, 0.5), (-2.0, 2.0)):
        val = osc(f, OscParams(p=2.0, degree=0), np.array([x0]), r)
        assert val == pytest.approx(2.0 * r / np.sqrt(3.0), rel=1e-9)


def test_polynomials_fit_exactly_to_zero():
    # degree <= N leaves an exactly zero residual (snapped at machine scale)
    f = build_field("cubic")
    assert osc(f, OscParams(p=2.0, degree=3), np.array([0.3]), 1.0) == 0.0
    assert osc(f, OscParams(p=3.0, degree=3), np.array([0.3]), 1.0) == 0.0


def test_monotone_in_degree():
    f = build_field("gauss")
    params = [OscParams(p=2.0, degree=N) for N in (-1, 0, 1, 2)]
    vals = [osc(f, op, np.zeros(1), 2.0) for op in params]
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))


def test_degree_minus_one_is_lp_mean():
    # N = -1 subtracts nothing: the normalized L^p mean of |f|
    f = build_field("const", c=3.0)
    val = osc(f, OscParams(p=2.0, degree=-1), np.zeros(1), 1.0)
    assert val == pytest.approx(3.0)


def test_general_p_approaches_p2():
    f = build_field("gauss")
    a = osc(f, OscParams(p=2.0, degree=1), np.zeros(1), 1.0)
    b = osc(f, OscParams(p=2.0 + 1e-4, degree=1), np.zeros(1), 1.0)
    assert b == pytest.approx(a, rel=1e-3)


def test_general_p_beats_any_grid_candidate():
    # the optimizer's value must be <= the best value over a coefficient grid
    # and match a local 41x41 refinement around it
    f = build_field("quadratic")
    op = OscParams(p=3.0, degree=1)
    value, P = osc_fit(f, op, np.zeros(1), 1.0)
    from campanato.integration import unit_ball_rule
    u, w = unit_ball_rule(1, order=64)
    x = u[:, 0]
    aa, bb = np.meshgrid(np.linspace(0.0, 0.7, 41),
                         np.linspace(-0.3, 0.3, 41), indexing="ij")
    res = np.abs(x[None, :] ** 2 - aa.reshape(-1, 1)
                 - bb.reshape(-1, 1) * x[None, :])
    grid_best = ((res**3 @ (w / 2.0)) ** (1 / 3)).min()
    assert value <= grid_best + 1e-9
    assert value == pytest.approx(grid_best, abs=2e-4)


def test_fit_returns_the_minimizing_polynomial():
    f = build_field("quadratic")
    value, P = osc_fit(f, OscParams(p=2.0, degree=1), np.zeros(1), 1.0)
    assert isinstance(P, Polynomial)
    assert P(np.array([0.0])) == pytest.approx(1.0 / 3.0, abs=1e-9)
    assert P.diff((1,))(np.array([0.0])) == pytest.approx(0.0, abs=1e-9)


def test_profile_matches_pointwise_calls():
    f = build_field("gauss")
    op = OscParams(p=2.0, degree=1)
    prof = osc_profile(f, op, np.array([0.25]), (-2, 3))
    assert isinstance(prof, DyadicProfile)
    assert prof.j_min == -2 and prof.j_max == 3
    for j, v in zip(range(-2, 4), prof.values):
        assert v == pytest.approx(osc(f, op, np.array([0.25]), 2.0**j),
                                  rel=1e-12)


def test_profile_batch_matches_per_center():
    f = build_field("sin")
    op = OscParams(p=2.0, degree=0)
    centers = np.array([[0.0], [0.5], [1.0]])
    block = profile_batch(f, op, centers, (-1, 2))
    for i, c in enumerate(centers):
        prof = osc_profile(f, op, c, (-1, 2))
        assert np.abs(block[i] - prof.values).max() < 1e-12


def test_scale_invariance_of_linear_residual():
    # osc_{2,0}(a x; 0, r) = a r / sqrt(3): doubling r doubles the value
    f = build_field("linear", a=1.0)
    op = OscParams(p=2.0, degree=0)
    v1 = osc(f, op, np.zeros(1), 1.0)
    v2 = osc(f, op, np.zeros(1), 2.0)
    assert v2 == pytest.approx(2.0 * v1, rel=1e-12)


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        OscParams(p=0.5)
    with pytest.raises(ValueError):
        OscParams(degree=-2)
