"""Weighted-minimal polynomial: exactness, half-ball bound, continuation."""

import numpy as np
import pytest

from campanato.fields import build_field
from campanato.minimal_poly import (continuation_to_zero, half_ball_factor,
                                    solve_minimal)
from campanato.polynomials import Polynomial, coeff_distance


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_polynomial_is_its_own_minimizer(p):
    # the integrand is pointwise minimal at P = Q, so Q solves every delta
    rng = np.random.default_rng(int(10 * p))
    Q = Polynomial(1, 2, (0.0,), rng.normal(size=3))
    P, rep = solve_minimal(Q, 2, np.zeros(1), 1.0, p, 1e-8)
    assert coeff_distance(P, Q) < 1e-8
    assert rep.grad_norm < 1e-9


def test_p2_small_delta_matches_weighted_mean():
    # at p = 2 the objective ||phi (f - P)||_2^2 is quadratic for any delta;
    # with N = 0 the minimizer is the phi^2-weighted mean
    f = build_field("gauss")
    P, _ = solve_minimal(f, 0, np.zeros(1), 1.0, 2.0, 1e-10)
    from campanato.integration import unit_ball_rule
    from campanato.mollifier import Mollifier
    u, w = unit_ball_rule(1, order=48)
    w2 = w * Mollifier(1)(u) ** 2
    assert P.coeffs[0] == pytest.approx(float(w2 @ f(u) / w2.sum()),
                                        abs=1e-8)


def test_delta_monotone_convergence():
    f = build_field("sin")
    P, rep = continuation_to_zero(f, 1, np.array([0.4]), 1.0, 2.5)
    assert rep.converged
    assert rep.increments[-1] < 1e-8
    # the trace must settle: the tail of the increments is far below the head
    head = max(rep.increments[:3])
    tail = max(rep.increments[-3:])
    assert tail <= head * 1e-3 + 1e-15


def test_gradient_small_at_every_stage():
    f = build_field("gauss")
    _, rep = continuation_to_zero(f, 1, np.zeros(1), 1.0, 3.0)
    assert max(rep.grad_norms) < 1e-6


@pytest.mark.parametrize("name,p,N", [("gauss", 2.0, 1), ("sin", 3.0, 0),
                                      ("bump", 1.5, 2), ("logsin", 2.5, 1)])
def test_half_ball_factor_bounded_by_two(name, p, N):
    f = build_field(name)
    delta = 1e-6
    P, _ = solve_minimal(f, N, np.array([0.3]), 1.0, p, delta)
    factor = half_ball_factor(f, P, np.array([0.3]), 1.0, p, delta)
    assert factor <= 2.0 + 1e-6


def test_half_ball_factor_scales_with_radius():
    f = build_field("gauss")
    for r in (0.5, 1.0, 2.0):
        delta = 1e-6
        P, _ = solve_minimal(f, 1, np.zeros(1), r, 2.0, delta)
        assert half_ball_factor(f, P, np.zeros(1), r, 2.0, delta) <= 2.0 + 1e-6
