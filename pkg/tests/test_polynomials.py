"""Multi-index bookkeeping and polynomial arithmetic."""

import numpy as np
import pytest

from campanato.polynomials import (BallSpec, Polynomial, basis, basis_size,
                                   coeff_distance, lp_norm_on_ball,
                                   mi_binom, mi_degree, mi_factorial)


def test_basis_graded_lex_and_count():
    idx = basis(2, 2)
    assert idx == ((0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0))
    # C(n + N, N) entries in dimension n
    assert basis_size(1, 3) == 4
    assert basis_size(2, 3) == 10


def test_multi_index_helpers():
    assert mi_degree((2, 1)) == 3
    assert mi_factorial((3, 2)) == 12
    assert mi_binom((3, 1), (2, 0)) == 3
    assert mi_binom((1, 0), (0, 1)) == 0


def test_polynomial_evaluation_against_horner():
    rng = np.random.default_rng(0)
    c = rng.normal(size=4)
    P = Polynomial(1, 3, (0.5,), c)
    x = rng.normal(size=(20, 1))
    u = x[:, 0] - 0.5
    expect = c[0] + c[1] * u + c[2] * u**2 + c[3] * u**3
    assert np.abs(P(x) - expect).max() < 1e-12


def test_from_dict_and_single_point_call():
    P = Polynomial.from_dict(2, 2, {(1, 1): 2.0, (0, 0): -1.0})
    assert P(np.array([3.0, 4.0])) == pytest.approx(2.0 * 12 - 1.0)


def test_diff_matches_calculus():
    # d^2/dx^2 of (x - 1)^3 is 6 (x - 1)
    P = Polynomial.from_dict(1, 3, {(3,): 1.0}, center=(1.0,))
    D = P.diff((2,))
    x = np.linspace(-2, 2, 9)[:, None]
    assert np.abs(D(x) - 6.0 * (x[:, 0] - 1.0)).max() < 1e-12


def test_gradient_mixed_2d():
    P = Polynomial.from_dict(2, 2, {(1, 1): 1.0, (2, 0): 3.0})
    g = P.gradient(np.array([[1.0, 2.0]]))
    assert np.abs(g - np.array([[2.0 + 6.0, 1.0]])).max() < 1e-12


def test_recenter_is_exact():
    rng = np.random.default_rng(1)
    P = Polynomial(2, 3, (0.0, 0.0), rng.normal(size=basis_size(2, 3)))
    Q = P.recenter((1.3, -0.7))
    pts = rng.normal(size=(50, 2))
    assert np.abs(P(pts) - Q(pts)).max() < 1e-10
    assert coeff_distance(P, Q) < 1e-10


def test_coeff_distance_detects_difference():
    P = Polynomial.from_dict(1, 1, {(1,): 1.0})
    Q = Polynomial.from_dict(1, 1, {(1,): 1.5})
    assert coeff_distance(P, Q) == pytest.approx(0.5)


def test_coefficient_count_enforced():
    with pytest.raises(ValueError):
        Polynomial(2, 2, (0.0, 0.0), np.zeros(5))


def test_lp_norm_on_ball_closed_form():
    # ||x||_{L^2(-1,1)} = sqrt(2/3)
    P = Polynomial.from_dict(1, 1, {(1,): 1.0})
    ball = BallSpec((0.0,), 1.0)
    assert lp_norm_on_ball(P, ball, 2.0) == pytest.approx(np.sqrt(2.0 / 3.0))
    # sup-norm over the same ball
    assert lp_norm_on_ball(P, ball, np.inf) == pytest.approx(1.0, abs=1e-9)


def test_zero_polynomial():
    Z = Polynomial.zero(2)
    assert Z(np.zeros((3, 2))).tolist() == [0.0, 0.0, 0.0]
