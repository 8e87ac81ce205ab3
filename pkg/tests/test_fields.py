"""Registry fields, grid fields, and their declared bounds."""

import numpy as np
import pytest

from campanato.fields import (FuncField, GridField, box_lattice, build_field,
                              field_sup_on_points, grad_sup_on_box, load_grid,
                              registry, save_grid, tent_cascade)


def test_registry_entries_instantiate_and_evaluate():
    for name, entry in registry().items():
        f = entry.factory()
        assert f.dim == entry.dim
        pts = np.full((3, entry.dim), 0.25)
        vals = np.atleast_1d(f(pts))
        assert vals.shape == (3,)
        assert np.isfinite(vals).all()


def test_unknown_function_rejected():
    with pytest.raises(KeyError):
        build_field("no_such_function")


def test_parameter_override():
    f = build_field("sin", omega=2.0)
    x = np.array([[0.4]])
    assert np.atleast_1d(f(x))[0] == pytest.approx(np.sin(0.8))


@pytest.mark.parametrize("name", ["gauss", "sin", "bump", "gauss2"])
def test_sup_bound_holds_on_samples(name):
    f = build_field(name)
    rng = np.random.default_rng(0)
    pts = rng.uniform(-3, 3, size=(500, f.dim))
    assert np.abs(f(pts)).max() <= f.sup_bound + 1e-12


@pytest.mark.parametrize("name", ["gauss", "sin", "logsin", "gauss2"])
def test_gradient_matches_finite_differences(name):
    f = build_field(name)
    rng = np.random.default_rng(1)
    pts = rng.uniform(-1.5, 1.5, size=(20, f.dim))
    g = f.gradient(pts)
    h = 1e-6
    for k in range(f.dim):
        e = np.zeros(f.dim)
        e[k] = h
        fd = (f(pts + e) - f(pts - e)) / (2 * h)
        assert np.abs(g[:, k] - fd).max() < 1e-6


def test_lp_mass_closed_forms():
    # gauss: ||e^{-x^2/2}||_p = (2 pi / p)^{1/(2p)} ... in 1d:
    # int e^{-p x^2 / 2} dx = sqrt(2 pi / p)
    f = build_field("gauss")
    for p in (1.0, 2.0, 3.0):
        assert f.lp_mass(p) == pytest.approx(np.sqrt(2 * np.pi / p) ** (1 / p))
    # tent cascade: the disjoint-tent sum 2/(3 (p+1)) upper-bounds the true
    # mass (the m = 1 / m = 2 overlap takes the max, not the sum) and is
    # tight to a few percent
    t = build_field("tent_cascade")
    for p in (1.0, 2.0):
        xs = np.linspace(0, 1, 400001)
        num = (np.trapezoid(tent_cascade(xs) ** p, xs)) ** (1 / p)
        assert num <= t.lp_mass(p) <= 1.03 * num


def test_tent_cascade_shape():
    # peaks at 2^-m, zero at 0 and outside (0, 3/4]
    ms = np.arange(1, 12, dtype=float)
    assert np.abs(tent_cascade(2.0**-ms) - 1.0).max() < 1e-12
    assert tent_cascade(np.array([0.0, -0.3, 0.8, 2.0])).max() == 0.0
    xs = np.linspace(-1, 2, 10001)
    vals = tent_cascade(xs)
    assert vals.min() >= 0.0 and vals.max() <= 1.0
    # overlap region takes the max of the two tents
    x = 0.27  # between the m = 1 and m = 2 supports
    t1 = 1.0 - 4.0 * abs(x - 0.5)
    t2 = 1.0 - 16.0 * abs(x - 0.25)
    assert tent_cascade(np.array([x]))[0] == pytest.approx(max(t1, t2))


def test_step_is_a_unit_step():
    f = build_field("step")
    assert np.allclose(f(np.array([[-1.0], [-1e-9]])), 0.0)
    assert np.allclose(f(np.array([[1e-9], [2.0]])), 1.0)


def test_grid_field_interpolates_and_derivates():
    f = build_field("gauss2")
    g = GridField.sample(f, [-2, -2], [2, 2], 81, method="cubic")
    rng = np.random.default_rng(2)
    pts = rng.uniform(-1.8, 1.8, size=(100, 2))
    assert np.abs(g(pts) - f(pts)).max() < 1e-4
    d = g.derivative((1, 0))
    assert np.abs(d(pts) - f.derivative((1, 0))(pts)).max() < 1e-2


def test_grid_field_refuses_extrapolation():
    g = GridField.sample(build_field("gauss"), [-1], [1], 11)
    with pytest.raises(ValueError):
        g(np.array([[1.5]]))


@pytest.mark.parametrize("ext", ["npz", "csv"])
def test_grid_save_load_round_trip(ext, tmp_path):
    f = build_field("gauss2")
    g = GridField.sample(f, [-1, -1], [1, 2], 9)
    path = tmp_path / f"grid.{ext}"
    save_grid(g, path)
    back = load_grid(path)
    assert np.array_equal(back.values, g.values)
    assert np.array_equal(back.lower, g.lower)
    assert np.array_equal(back.upper, g.upper)


def test_grid_save_bytes_reproducible(tmp_path):
    g = GridField.sample(build_field("gauss"), [-1], [1], 33)
    a, b = tmp_path / "a.npz", tmp_path / "b.npz"
    save_grid(g, a)
    save_grid(g, b)
    assert a.read_bytes() == b.read_bytes()


def test_box_lattice_and_sup_helpers():
    pts = box_lattice([-1, -1], [1, 1], 5)
    assert pts.shape == (25, 2)
    # the bump's interior max at 0 is off any even lattice; the candidate
    # list must still find it
    f = build_field("bump")
    lat = box_lattice([-1], [1], 4)
    assert field_sup_on_points(f, lat) == pytest.approx(np.exp(-1.0))
    b = np.ones(1)
    assert grad_sup_on_box(build_field("linear", a=3.0), -b, b) == \
        pytest.approx(3.0)


def test_func_field_carries_declared_bounds():
    f = FuncField(lambda p: np.cos(p[:, 0]), dim=1, sup_bound=1.0)
    assert f.sup_bound == 1.0
    assert f.gradient(np.zeros((1, 1))) is None
