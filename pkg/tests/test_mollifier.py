"""Generalized means, moment projection, asymptotic limit, mollification."""

import numpy as np
import pytest

from campanato.fields import build_field
from campanato.mollifier import (Mollifier, asymptotic_poly, gen_mean,
                                 mollify, project, project_commutes_check,
                                 project_homog)
from campanato.polynomials import Polynomial, basis_size, coeff_distance


def test_kernel_has_unit_mass():
    for dim in (1, 2):
        m = Mollifier(dim)
        from campanato.integration import unit_ball_rule
        u, w = unit_ball_rule(dim, order=48 if dim == 1 else 32)
        assert w @ m(u) == pytest.approx(1.0, abs=1e-8)


def test_zeroth_mean_of_constant():
    f = build_field("const", c=2.5)
    assert gen_mean(f, (0,), np.zeros(1), 0.7) == pytest.approx(2.5)


def test_first_mean_recovers_slope():
    # mean with alpha = (1,) of a linear field is its slope (integration by
    # parts moves the derivative off the kernel); scale-free in r
    f = build_field("linear", a=1.75)
    for r in (0.5, 1.0, 2.0):
        assert gen_mean(f, (1,), np.zeros(1), r) == pytest.approx(
            1.75, abs=1e-6)


@pytest.mark.parametrize("dim,degree", [(1, 0), (1, 2), (1, 3), (2, 1),
                                        (2, 3)])
def test_projection_fixes_polynomials(dim, degree):
    rng = np.random.default_rng(degree + 10 * dim)
    Q = Polynomial(dim, degree, (0.0,) * dim,
                   rng.normal(size=basis_size(dim, degree)))
    x0 = rng.normal(size=dim) * 0.5
    P = project(Q, degree, x0, 1.3)
    assert coeff_distance(P, Q) < 1e-9


def test_projection_report_flags_solver_quality():
    f = build_field("gauss")
    P, rep = project(f, 2, np.zeros(1), 1.0, with_report=True)
    assert rep.residual < 1e-10
    assert rep.cond < 1e4


def test_projection_commutes_with_derivative():
    out = project_commutes_check(build_field("gauss"), 3, (1,),
                                 np.zeros(1), 1.0)
    assert out["coeff_distance"] < 1e-8


def test_homogeneous_projection_top_degree():
    # for f = x^3 the degree-3 homogeneous projection is x^3 itself; the
    # third kernel derivative is steep near the boundary, so this needs a
    # denser rule than the default
    Q = Polynomial.from_dict(1, 3, {(3,): 1.0})
    P = project_homog(Q, 3, np.zeros(1), 1.0, order=192)
    assert abs(P.coeffs[-1] - 1.0) < 1e-9


def test_asymptotic_poly_of_polynomial_is_itself():
    Q = Polynomial.from_dict(1, 2, {(2,): 0.75})
    P, rep = asymptotic_poly(Q, 2, np.zeros(1), j_window=(0, 8))
    assert rep.converged
    assert abs(P.coeffs[-1] - 0.75) < 1e-6


def test_asymptotic_poly_base_point_independent():
    f = build_field("cubic")
    P0, _ = asymptotic_poly(f, 3, np.zeros(1), j_window=(0, 8))
    P1, _ = asymptotic_poly(f, 3, np.array([1.0]), j_window=(0, 8))
    assert coeff_distance(P0, P1) < 1e-5


def test_mollify_converges_and_respects_sup():
    f = build_field("gauss")
    x = np.linspace(-2, 2, 41)[:, None]
    errs = [np.abs(mollify(f, eps)(x) - f(x)).max()
            for eps in (0.4, 0.2, 0.1)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 5e-3
    assert np.abs(mollify(f, 0.3)(x)).max() <= f.sup_bound + 1e-12


def test_mollified_derivative_of_rough_field():
    # the step has no derivative; its mollification does, peaked at 0
    f = build_field("step")
    d = mollify(f, 0.5).derivative((1,))
    x = np.array([[-2.0], [0.0], [2.0]])
    vals = d(x)
    assert abs(vals[0]) < 1e-12 and abs(vals[2]) < 1e-12
    assert vals[1] > 0.5
