"""Ball quadrature: exact volumes, polynomial exactness, error estimates."""

import numpy as np
import pytest

from campanato.integration import ball_integrate, ball_rule, unit_ball_rule


@pytest.mark.parametrize("dim,kind", [(1, "gauss"), (1, "composite"),
                                      (2, "polar")])
def test_weights_sum_to_ball_volume(dim, kind):
    _, w = unit_ball_rule(dim, kind=kind)
    vol = 2.0 if dim == 1 else np.pi
    assert abs(w.sum() - vol) < 1e-9


def test_tensor_volume_error_shrinks_with_order():
    # the indicator-cut rule is not volume-exact; its boundary error must
    # shrink as the order grows
    errs = [abs(unit_ball_rule(2, kind="tensor", order=n)[1].sum() - np.pi)
            for n in (12, 24, 48, 96)]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 0.02


@pytest.mark.parametrize("dim,kind", [(1, "gauss"), (1, "composite"),
                                      (2, "polar"), (2, "tensor")])
def test_nodes_inside_closed_ball(dim, kind):
    u, _ = unit_ball_rule(dim, kind=kind)
    assert (np.sqrt((u**2).sum(axis=1)) <= 1.0 + 1e-12).all()


@pytest.mark.parametrize("kind", ["gauss", "composite"])
def test_polynomial_moments_1d(kind):
    # odd moments vanish, even moments are 2/(k+1) on [-1, 1]
    u, w = unit_ball_rule(1, kind=kind)
    for k in range(8):
        exact = 0.0 if k % 2 else 2.0 / (k + 1)
        assert abs(w @ u[:, 0] ** k - exact) < 1e-12


def test_polynomial_moments_2d_polar():
    # int_{|x|<1} x1^2 = int x2^2 = pi/4; int x1^2 x2^2 = pi/24
    u, w = unit_ball_rule(2, kind="polar")
    assert abs(w @ u[:, 0] ** 2 - np.pi / 4) < 1e-9
    assert abs(w @ (u[:, 0] * u[:, 1]) ** 2 - np.pi / 24) < 1e-9
    assert abs(w @ (u[:, 0] * u[:, 1])) < 1e-12


def test_scaled_rule_translates_and_scales():
    pts, w = ball_rule(np.array([2.0, -1.0]), 0.5)
    assert abs(w.sum() - np.pi * 0.25) < 1e-9
    assert (np.sqrt(((pts - [2.0, -1.0]) ** 2).sum(axis=1)) <= 0.5 + 1e-12).all()


def test_ball_integrate_gaussian_2d():
    # int_{|x|<r} e^{-|x|^2} = pi (1 - e^{-r^2})
    val = ball_integrate(lambda p: np.exp(-(p**2).sum(axis=1)),
                         np.zeros(2), 1.5)
    assert abs(val - np.pi * (1 - np.exp(-2.25))) < 1e-8


def test_refine_reports_small_error_for_smooth():
    val, err = ball_integrate(lambda p: np.cos(p[:, 0]), np.zeros(1), 1.0,
                              refine=True)
    assert abs(val - 2 * np.sin(1.0)) < 1e-12
    assert err < 1e-12


def test_composite_resolves_narrow_feature():
    # a spike of width 2e-3 inside a ball of radius 8: the fixed-order global
    # rule steps over it entirely, the composite rule captures its mass to
    # within a cell fraction
    left, width = 0.1, 2e-3

    def spike(p):
        x = p[:, 0]
        return ((x >= left) & (x <= left + width)).astype(float)

    exact = width
    val = ball_integrate(spike, np.zeros(1), 8.0, kind="composite",
                         order=16384)
    assert abs(val - exact) < 0.05 * exact
    starved = ball_integrate(spike, np.zeros(1), 8.0, kind="gauss")
    assert abs(starved - exact) > 0.5 * exact


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        unit_ball_rule(1, kind="polar")
    with pytest.raises(ValueError):
        unit_ball_rule(2, kind="gauss")
