"""Polynomials on R^n in shifted-monomial form.

A polynomial of degree bound N >= -1 is stored as coefficients over the
graded-lex monomial basis ``(x - center)^alpha``, ``|alpha| <= N``.  N = -1 is
the zero polynomial (empty basis).  Multi-indices are plain tuples of ints;
helpers below cover the factorial/binomial combinatorics.  Differentiation and
recentering act on coefficients with exact integer factors.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import comb, factorial

import numpy as np

from .integration import DEFAULT_KIND, DEFAULT_ORDER, ball_lattice, ball_rule

__all__ = [
    "MultiIndex",
    "mi_degree",
    "mi_factorial",
    "mi_binom",
    "basis",
    "basis_size",
    "BallSpec",
    "Polynomial",
    "design_matrix",
    "lp_norm_on_ball",
    "coeff_distance",
]

MultiIndex = tuple  # tuple of n non-negative ints


def mi_degree(alpha):
    """Total degree |alpha|."""
    return sum(alpha)


def mi_factorial(alpha):
    """alpha! = prod alpha_i!"""
    out = 1
    for a in alpha:
        out *= factorial(a)
    return out


def mi_binom(alpha, beta):
    """prod binom(alpha_i, beta_i); zero unless beta <= alpha componentwise."""
    out = 1
    for a, b in zip(alpha, beta):
        if b > a:
            return 0
        out *= comb(a, b)
    return out


@lru_cache(maxsize=None)
def basis(dim, degree_bound):
    """Graded-lex multi-index basis for degree bound N; empty for N = -1."""
    if degree_bound < 0:
        return ()
    out = []
    for d in range(degree_bound + 1):
        out.extend(
            sorted(a for a in product(range(d + 1), repeat=dim) if sum(a) == d)
        )
    return tuple(out)


def basis_size(dim, degree_bound):
    return len(basis(dim, degree_bound))


@dataclass(frozen=True)
class BallSpec:
    """Closed ball B(center, radius)."""

    center: tuple
    radius: float

    @property
    def dim(self):
        return len(self.center)


def design_matrix(points, center, indices):
    """Matrix of (x - center)^alpha, shape (M, len(indices))."""
    pts = np.atleast_2d(np.asarray(points, dtype=float)) - np.asarray(center, float)
    cols = [np.prod(pts**np.array(alpha), axis=1) for alpha in indices]
    if not cols:
        return np.zeros((pts.shape[0], 0))
    return np.stack(cols, axis=1)


@dataclass(frozen=True)
class Polynomial:
    """P(x) = sum_alpha coeffs[alpha] (x - center)^alpha, graded-lex order."""

    dim: int
    degree_bound: int
    center: tuple
    coeffs: np.ndarray

    def __post_init__(self):
        want = basis_size(self.dim, self.degree_bound)
        if len(self.coeffs) != want:
            raise ValueError(
                f"need {want} coefficients for dim {self.dim}, "
                f"degree bound {self.degree_bound}; got {len(self.coeffs)}"
            )

    @classmethod
    def zero(cls, dim):
        return cls(dim, -1, (0.0,) * dim, np.zeros(0))

    @classmethod
    def from_dict(cls, dim, degree_bound, coeff_map, center=None):
        """Build from {multi-index: coefficient}; unlisted entries are zero."""
        center = (0.0,) * dim if center is None else tuple(center)
        idx = basis(dim, degree_bound)
        c = np.zeros(len(idx))
        for alpha, v in coeff_map.items():
            c[idx.index(tuple(alpha))] = v
        return cls(dim, degree_bound, center, c)

    @property
    def indices(self):
        return basis(self.dim, self.degree_bound)

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        squeeze = points.ndim == 1
        E = design_matrix(points, self.center, self.indices)
        vals = E @ self.coeffs if self.coeffs.size else np.zeros(E.shape[0])
        return float(vals[0]) if squeeze else vals

    def diff(self, beta):
        """D^beta (exact integer falling factorials on coefficients)."""
        beta = tuple(beta)
        new_bound = max(self.degree_bound - mi_degree(beta), -1)
        new_idx = basis(self.dim, new_bound)
        out = np.zeros(len(new_idx))
        for alpha, c in zip(self.indices, self.coeffs):
            if all(a >= b for a, b in zip(alpha, beta)):
                tgt = tuple(a - b for a, b in zip(alpha, beta))
                fac = 1
                for a, b in zip(alpha, beta):
                    fac *= factorial(a) // factorial(a - b)
                out[new_idx.index(tgt)] += fac * c
        return Polynomial(self.dim, new_bound, self.center, out)

    def gradient(self, points):
        """Gradient rows at each point, shape (M, dim)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        cols = []
        for k in range(self.dim):
            e = tuple(1 if i == k else 0 for i in range(self.dim))
            cols.append(self.diff(e)(points))
        return np.stack(cols, axis=1)

    def recenter(self, new_center):
        """Same polynomial expressed around new_center (exact binomials)."""
        new_center = tuple(new_center)
        shift = np.array(new_center, float) - np.array(self.center, float)
        idx = self.indices
        out = np.zeros(len(idx))
        for alpha, c in zip(idx, self.coeffs):
            if c == 0.0:
                continue
            for gamma in idx:
                b = mi_binom(alpha, gamma)
                if b == 0:
                    continue
                out[idx.index(gamma)] += (
                    c * b * np.prod(shift ** np.array(
                        [a - g for a, g in zip(alpha, gamma)]))
                )
        return Polynomial(self.dim, self.degree_bound, new_center, out)


def lp_norm_on_ball(poly, ball, p=2.0, kind=None, order=None, sup_per_axis=None):
    """||P||_{L^p(B)} by quadrature; p = inf as a max over nodes plus a dense
    fallback lattice (101 per axis for n = 1, 41 for n = 2)."""
    dim = ball.dim
    if np.isinf(p):
        pts, _ = ball_rule(ball.center, ball.radius, kind, order)
        per_axis = sup_per_axis or (101 if dim == 1 else 41)
        lat = ball_lattice(ball.center, ball.radius, per_axis)
        vals = np.abs(poly(np.concatenate([pts, lat], axis=0)))
        return float(vals.max()) if vals.size else 0.0
    pts, w = ball_rule(ball.center, ball.radius, kind, order)
    vals = np.abs(poly(pts))
    return float((w @ vals**p) ** (1.0 / p))


def coeff_distance(P, Q):
    """Max-abs coefficient difference after aligning centers and degrees."""
    dim = P.dim
    bound = max(P.degree_bound, Q.degree_bound)
    idx = basis(dim, bound)

    def lift(R):
        Rc = R.recenter(P.center)
        out = np.zeros(len(idx))
        for alpha, c in zip(Rc.indices, Rc.coeffs):
            out[idx.index(alpha)] = c
        return out

    return float(np.max(np.abs(lift(P) - lift(Q)))) if idx else 0.0
