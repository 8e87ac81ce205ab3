"""Scalar fields on R^n: analytic registry entries and grid-backed samples.

A ``ScalarField`` evaluates vectorized on (M, dim) point arrays and may expose
exact partial derivatives as further fields.  The analytic registry is a named
family of closed-form fields (with symbolic derivatives where they exist); grid
fields interpolate sampled values and differentiate by finite differences.
"""

from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np
import sympy as sp
from scipy.interpolate import RegularGridInterpolator

__all__ = [
    "ScalarField",
    "SymField",
    "FuncField",
    "GridField",
    "tent_cascade",
    "registry",
    "build_field",
    "as_points",
    "field_sup_on_points",
    "grad_sup_on_box",
    "box_lattice",
]


def as_points(points, dim):
    """Coerce to an (M, dim) float array; flag whether input was a single point."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        if dim == 1 and pts.shape[0] != 1:
            return pts[:, None], False
        return pts[None, :], True
    return pts, False


class ScalarField:
    """Base: subclasses implement _eval(pts) on (M, dim) arrays."""

    dim = 1
    sup_bound = None  # global bound on |f| when known
    critical_points = None  # candidate maximizers for sup-norm lattices
    lp_mass_fn = None  # p -> ||f||_{L^p(R^n)} (an upper bound) when known

    def _eval(self, pts):
        raise NotImplementedError

    def lp_mass(self, p):
        """Whole-space L^p norm (or an upper bound for it), else None."""
        return None if self.lp_mass_fn is None else float(self.lp_mass_fn(p))

    def __call__(self, points):
        pts, single = as_points(points, self.dim)
        vals = self._eval(pts)
        return float(vals[0]) if single else vals

    def derivative(self, alpha):
        """Exact D^alpha as a field, or None when unavailable."""
        return None

    def gradient(self, points):
        """Gradient rows (M, dim); None when any partial is unavailable."""
        parts = []
        for k in range(self.dim):
            e = tuple(1 if i == k else 0 for i in range(self.dim))
            d = self.derivative(e)
            if d is None:
                return None
            parts.append(d(points))
        pts, single = as_points(points, self.dim)
        out = np.stack([np.atleast_1d(p) for p in parts], axis=-1)
        return out[0] if single else out


class SymField(ScalarField):
    """Field backed by a sympy expression; derivatives are symbolic."""

    def __init__(self, expr, syms, sup_bound=None, critical_points=None,
                 name=None):
        self.expr = sp.sympify(expr)
        self.syms = tuple(syms)
        self.dim = len(self.syms)
        self.sup_bound = sup_bound
        self.critical_points = critical_points
        self.name = name
        self._fn = sp.lambdify(self.syms, self.expr, modules="numpy")

    def _eval(self, pts):
        with np.errstate(all="ignore"):
            vals = self._fn(*(pts[:, k] for k in range(self.dim)))
        return np.nan_to_num(np.broadcast_to(np.asarray(vals, float),
                                             (pts.shape[0],)).copy())

    def derivative(self, alpha):
        ex = self.expr
        for s, a in zip(self.syms, alpha):
            if a:
                ex = sp.diff(ex, s, a)
        return SymField(ex, self.syms)


class FuncField(ScalarField):
    """Field from a plain vectorized callable; optional derivative callables."""

    def __init__(self, fn, dim, derivs=None, sup_bound=None,
                 critical_points=None, name=None):
        self.fn = fn
        self.dim = dim
        self.derivs = derivs or {}
        self.sup_bound = sup_bound
        self.critical_points = critical_points
        self.name = name

    def _eval(self, pts):
        return np.asarray(self.fn(pts), dtype=float)

    def derivative(self, alpha):
        alpha = tuple(alpha)
        if sum(alpha) == 0:
            return self
        fn = self.derivs.get(alpha)
        return None if fn is None else FuncField(fn, self.dim)


class GridField(ScalarField):
    """Values on a uniform box lattice with linear or cubic interpolation.

    Evaluation outside the box raises (no silent extrapolation).  Derivatives
    come from centered finite differences on the lattice, returned as further
    grid fields.
    """

    def __init__(self, lower, upper, values, method="linear", sup_bound=None):
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.dim = self.lower.shape[0]
        self.method = method
        self.sup_bound = sup_bound
        axes = [
            np.linspace(self.lower[k], self.upper[k], self.values.shape[k])
            for k in range(self.dim)
        ]
        self._axes = axes
        self._interp = RegularGridInterpolator(
            axes, self.values, method=method, bounds_error=True
        )

    def _eval(self, pts):
        return self._interp(pts)

    def derivative(self, alpha):
        alpha = tuple(alpha)
        if sum(alpha) == 0:
            return self
        vals = self.values
        for k, a in enumerate(alpha):
            for _ in range(a):
                vals = np.gradient(vals, self._axes[k], axis=k, edge_order=2)
        return GridField(self.lower, self.upper, vals, method=self.method)

    @classmethod
    def sample(cls, f, lower, upper, per_axis, method="linear"):
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        axes = [np.linspace(lo, hi, per_axis) for lo, hi in zip(lower, upper)]
        grid = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([g.ravel() for g in grid], axis=1)
        vals = f(pts).reshape(grid[0].shape)
        return cls(lower, upper, vals, method=method,
                   sup_bound=getattr(f, "sup_bound", None))


def save_grid(gf, path):
    """Write a grid field to ``path`` (.npz binary or .csv text).

    The CSV layout is self-describing: comment lines carry the box and lattice
    shape, then one row per node in C order with coordinates and value.  Both
    formats round-trip exactly through :func:`load_grid`.
    """
    path = str(path)
    if path.endswith(".npz"):
        # hand-rolled zip with a fixed timestamp so identical grids produce
        # identical bytes (np.savez stamps wall-clock time into the archive)
        import io
        import zipfile

        with zipfile.ZipFile(path, "w", zipfile.ZIP_STORED) as zf:
            for name, arr in (("lower", gf.lower), ("upper", gf.upper),
                              ("values", gf.values)):
                buf = io.BytesIO()
                np.lib.format.write_array(buf, np.asanyarray(arr))
                info = zipfile.ZipInfo(name + ".npy",
                                       date_time=(1980, 1, 1, 0, 0, 0))
                zf.writestr(info, buf.getvalue())
        return
    if not path.endswith(".csv"):
        raise ValueError(f"grid-field path must end in .npz or .csv: {path!r}")
    fmt = "%.17g"
    shape = gf.values.shape
    pts = box_lattice(gf.lower, gf.upper, shape[0])
    lines = [
        "# campanato grid-field v1",
        "# lower: " + " ".join(fmt % v for v in gf.lower),
        "# upper: " + " ".join(fmt % v for v in gf.upper),
        "# shape: " + " ".join(str(n) for n in shape),
        ",".join(f"x{k}" for k in range(gf.dim)) + ",value",
    ]
    flat = gf.values.reshape(-1)
    for row, val in zip(pts, flat):
        lines.append(",".join(fmt % v for v in row) + "," + fmt % val)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_grid(path, method="linear"):
    """Read a grid field written by :func:`save_grid`."""
    path = str(path)
    if path.endswith(".npz"):
        data = np.load(path)
        return GridField(data["lower"], data["upper"], data["values"],
                         method=method)
    with open(path) as fh:
        lines = fh.read().splitlines()
    header = {}
    body = []
    for line in lines:
        if line.startswith("# ") and ":" in line:
            key, _, rest = line[2:].partition(":")
            header[key.strip()] = rest.split()
        elif line and not line.startswith("#"):
            body.append(line)
    lower = np.array([float(v) for v in header["lower"]])
    upper = np.array([float(v) for v in header["upper"]])
    shape = tuple(int(v) for v in header["shape"])
    vals = np.array([float(r.rsplit(",", 1)[1]) for r in body[1:]])
    return GridField(lower, upper, vals.reshape(shape), method=method)


def tent_cascade(points):
    """Piecewise-linear cascade of unit tents with peaks at 2^-m, m >= 1.

    The tent at peak 2^-m has half-width 4^-m and slope 4^m.  The m = 1 and
    m = 2 supports overlap on [1/4, 5/16); the value there is the max of the
    two tents, keeping 0 <= u <= 1 with u(2^-m) = 1.  Zero outside (0, 3/4].
    """
    x = np.asarray(points, dtype=float).reshape(-1)
    u = np.zeros_like(x)
    pos = x > 0
    if not pos.any():
        return u
    xp = x[pos]
    base = np.round(-np.log2(np.clip(xp, 1e-300, None))).astype(int)
    acc = np.zeros_like(xp)
    for off in (-1, 0, 1):
        m = np.clip(base + off, 1, 500)
        tent = 1.0 - 4.0**m * np.abs(xp - 2.0 ** (-m.astype(float)))
        acc = np.maximum(acc, np.clip(tent, 0.0, None))
    u[pos] = acc
    return u


def _tent_field():
    return FuncField(
        lambda pts: tent_cascade(pts[:, 0]),
        dim=1,
        sup_bound=1.0,
        critical_points=np.array([[2.0**-m] for m in range(1, 12)]),
        name="tent_cascade",
    )


def _step_field():
    return FuncField(
        lambda pts: (pts[:, 0] >= 0).astype(float),
        dim=1,
        sup_bound=1.0,
        name="step",
    )


@dataclass(frozen=True)
class RegistryEntry:
    name: str
    dim: int
    params: dict
    description: str
    factory: object = dc_field(repr=False, default=None)


def _sym_entry(name, dim, params, description, builder, **extra):
    def factory(**over):
        kw = {**params, **over}
        return builder(**kw)

    return RegistryEntry(name, dim, params, description, factory)


_X = sp.symbols("x0")
_XY = sp.symbols("x0 x1")


@lru_cache(maxsize=16)
def _bump_mass(p, radius):
    """||bump||_{L^p(R)}: the integrand is smooth and supported in (-R, R)."""
    from .integration import unit_ball_rule

    u, w = unit_ball_rule(1, order=64)
    vals = np.exp(-p / (1.0 - u[:, 0] ** 2))
    return float(radius * (w * vals).sum()) ** (1.0 / p)


def _with_mass(f, mass_fn):
    f.lp_mass_fn = mass_fn
    return f


@lru_cache(maxsize=1)
def registry():
    """Analytic field registry: name -> RegistryEntry."""
    e = {}

    def add(entry):
        e[entry.name] = entry

    add(_sym_entry(
        "const", 1, {"c": 1.0}, "constant c",
        lambda c: SymField(sp.Float(c), (_X,), sup_bound=abs(c),
                           name="const")))
    add(_sym_entry(
        "linear", 1, {"a": 1.0}, "a*x",
        lambda a: SymField(a * _X, (_X,), name="linear")))
    add(_sym_entry(
        "quadratic", 1, {}, "x^2",
        lambda: SymField(_X**2, (_X,), critical_points=np.array([[0.0]]),
                         name="quadratic")))
    add(_sym_entry(
        "cubic", 1, {}, "x^3",
        lambda: SymField(_X**3, (_X,), name="cubic")))
    add(_sym_entry(
        "abs", 1, {}, "|x|",
        lambda: SymField(sp.Abs(_X), (_X,), critical_points=np.array([[0.0]]),
                         name="abs")))
    add(_sym_entry(
        "sin", 1, {"omega": 1.0}, "sin(omega*x)",
        lambda omega: SymField(sp.sin(omega * _X), (_X,), sup_bound=1.0,
                               name="sin")))
    add(_sym_entry(
        "gauss", 1, {"sigma": 1.0}, "exp(-x^2 / (2 sigma^2))",
        lambda sigma: _with_mass(
            SymField(sp.exp(-_X**2 / (2 * sigma**2)), (_X,),
                     sup_bound=1.0,
                     critical_points=np.array([[0.0]]),
                     name="gauss"),
            lambda p, s=sigma: (s * np.sqrt(2 * np.pi / p)) ** (1.0 / p))))
    add(_sym_entry(
        "bump", 1, {"radius": 1.0},
        "exp(-1/(1-(x/R)^2)) on |x| < R, else 0",
        lambda radius: _with_mass(
            SymField(
                sp.Piecewise(
                    (sp.exp(-1 / (1 - (_X / radius) ** 2)),
                     sp.Abs(_X) < radius),
                    (0.0, True),
                ),
                (_X,),
                sup_bound=float(np.exp(-1.0)),
                critical_points=np.array([[0.0]]),
                name="bump"),
            lambda p, R=radius: _bump_mass(p, R))))
    add(_sym_entry(
        "logsin", 1, {}, "x*sin(log(1+x^2))",
        lambda: SymField(_X * sp.sin(sp.log(1 + _X**2)), (_X,),
                         name="logsin")))
    add(RegistryEntry("step", 1, {}, "unit step at 0 (not continuous)",
                      lambda **kw: _step_field()))
    add(RegistryEntry(
        "tent_cascade", 1, {},
        "tent cascade peaking at 2^-m (bounded, not C^1)",
        # mass bound: the tents integrate to sum_m 2*4^-m/(p+1)
        lambda **kw: _with_mass(
            _tent_field(),
            lambda p: (2.0 / (3.0 * (p + 1.0))) ** (1.0 / p))))
    add(_sym_entry(
        "gauss2", 2, {"sigma": 1.0, "cx": 0.0, "cy": 0.0},
        "exp(-|x - c|^2 / (2 sigma^2))",
        lambda sigma, cx, cy: _with_mass(
            SymField(
                sp.exp(-((_XY[0] - cx) ** 2 + (_XY[1] - cy) ** 2)
                       / (2 * sigma**2)),
                _XY,
                sup_bound=1.0,
                critical_points=np.array([[cx, cy]]),
                name="gauss2"),
            lambda p, s=sigma: (2 * np.pi * s**2 / p) ** (1.0 / p))))
    return e


def build_field(name, **params):
    """Instantiate a registry field, overriding default parameters."""
    entry = registry().get(name)
    if entry is None:
        raise KeyError(f"unknown registry function {name!r}")
    return entry.factory(**params)


def box_lattice(lower, upper, per_axis):
    """Uniform lattice over a box, shape (per_axis^dim, dim)."""
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    axes = [np.linspace(lo, hi, per_axis) for lo, hi in zip(lower, upper)]
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=1)


def field_sup_on_points(f, pts):
    """max |f| over a point set plus the field's own candidate maximizers."""
    pts = np.atleast_2d(pts)
    if f.critical_points is not None:
        cand = np.atleast_2d(f.critical_points)
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        keep = ((cand >= lo) & (cand <= hi)).all(axis=1)
        if keep.any():
            pts = np.concatenate([pts, cand[keep]], axis=0)
    return float(np.max(np.abs(f(pts))))


def grad_sup_on_box(f, lower, upper, per_axis=41):
    """max euclidean |grad f| over a box lattice (exact gradient required)."""
    pts = box_lattice(lower, upper, per_axis)
    g = f.gradient(pts)
    if g is None:
        raise ValueError("field has no exact gradient")
    return float(np.sqrt((np.atleast_2d(g) ** 2).sum(axis=1)).max())
