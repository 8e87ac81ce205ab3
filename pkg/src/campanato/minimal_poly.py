"""Weighted L^p minimal polynomials with smoothing continuation.

For a field f and degree bound N, minimize over P in P_N the smoothed
weighted objective

    J_delta(P) = int_B (delta + |f - P|^2)^{p/2} phi^p dx,

where phi is the unnormalized kernel bump rescaled to B(x0, r) (no volume
prefactor; a constant factor does not move the minimizer).  The minimizer is
characterized by the vanishing of the weighted optimality functional built
from F_delta(u) = (delta + u^2)^{(p-2)/2} u.  delta is driven to a 1e-12 floor
by quartering with warm starts; p = 2 is delta-independent and closed-form.
"""

from dataclasses import dataclass

import numpy as np

from .integration import unit_ball_rule
from .mollifier import MEAN_ORDER, Mollifier
from .oscillation import _newton_stage, _smoothed
from .polynomials import BallSpec, Polynomial, basis, design_matrix, lp_norm_on_ball, mi_degree

__all__ = [
    "f_delta",
    "f_delta_prime",
    "WeightedObjective",
    "solve_minimal",
    "SolveReport",
    "continuation_to_zero",
    "ContinuationReport",
    "half_ball_factor",
]


def f_delta(u, delta, p):
    """Monotone residual transform (delta + u^2)^{(p-2)/2} u."""
    u = np.asarray(u, dtype=float)
    return (delta + u**2) ** ((p - 2.0) / 2.0) * u


def f_delta_prime(u, delta, p):
    """du derivative of f_delta; positive for p > 1, delta > 0."""
    u = np.asarray(u, dtype=float)
    return (delta + u**2) ** ((p - 4.0) / 2.0) * (delta + (p - 1.0) * u**2)


class WeightedObjective:
    """J_delta and its derivatives on a fixed ball rule.

    Coefficients live in the unit variable u = (x - x0)/r; the public
    polynomial is rescaled on the way out.
    """

    def __init__(self, f, degree, x0, r, p, delta, order=None):
        if p <= 1:
            raise ValueError("need p > 1")
        self.x0 = np.atleast_1d(np.asarray(x0, dtype=float))
        self.dim = self.x0.shape[0]
        self.degree = degree
        self.r = float(r)
        self.p = float(p)
        self.delta = float(delta)
        order = order or MEAN_ORDER[self.dim]
        u, w = unit_ball_rule(self.dim, order=order)
        self.u = u
        self.idx = basis(self.dim, degree)
        self.B = design_matrix(u, np.zeros(self.dim), self.idx)
        # unit-mass kernel at (x0 - y)/r = -u (radial, so the sign is moot);
        # no volume prefactor (a constant factor cannot move the minimizer)
        phi = Mollifier(self.dim)(u)
        self.phi = phi
        self.weights = (self.r**self.dim) * w * phi**self.p
        self.F = np.asarray(f(self.x0 + self.r * u), dtype=float)

    def value(self, c):
        return _smoothed(self.F, self.B, self.weights, c, self.delta, self.p)[0]

    def grad(self, c):
        return _smoothed(self.F, self.B, self.weights, c, self.delta, self.p)[1]

    def optimality_residual(self, c):
        """Max weighted moment of F_delta(f - P) against the basis; zero at
        the minimizer (this is -grad/p)."""
        g = self.grad(c)
        return float(np.max(np.abs(g), initial=0.0)) / self.p

    def start(self):
        """Weighted least-squares warm start (exact minimizer for p = 2)."""
        if not self.idx:
            return np.zeros(0)
        W = self.weights
        A = (self.B * W[:, None]).T @ self.B
        b = self.B.T @ (W * self.F)
        return np.linalg.solve(A, b)

    def to_polynomial(self, c):
        scale = np.array([self.r ** (-mi_degree(b)) for b in self.idx])
        return Polynomial(self.dim, self.degree, tuple(self.x0), c * scale)


@dataclass(frozen=True)
class SolveReport:
    grad_norm: float
    optimality: float
    value: float
    delta: float


def _solve(f, degree, x0, r, p, delta, order, grad_tol, max_iter, start):
    obj = WeightedObjective(f, degree, x0, r, p, delta, order)
    c0 = obj.start() if start is None else np.asarray(start, dtype=float)
    c, _, gnorm = _newton_stage(
        obj.F, obj.B, obj.weights, c0, obj.delta, obj.p, grad_tol, max_iter
    )
    rep = SolveReport(
        grad_norm=gnorm,
        optimality=obj.optimality_residual(c),
        value=obj.value(c),
        delta=delta,
    )
    return obj.to_polynomial(c), rep, c


def solve_minimal(f, degree, x0, r, p, delta, order=None, grad_tol=1e-9,
                  max_iter=80):
    """Minimize J_delta at fixed delta.  Returns (Polynomial, report)."""
    P, rep, _ = _solve(f, degree, x0, r, p, delta, order, grad_tol, max_iter,
                       None)
    return P, rep


@dataclass(frozen=True)
class ContinuationReport:
    deltas: tuple
    increments: tuple  # sup-norm coefficient steps between stages
    grad_norms: tuple
    converged: bool


def continuation_to_zero(f, degree, x0, r, p, delta0=1.0, floor=1e-12,
                         order=None, grad_tol=1e-9):
    """Quarter delta from delta0 down to the floor with warm starts.

    The iterates are a Cauchy sequence in the coefficients; converged means
    the final increment fell below 1e-8."""
    deltas = []
    d = float(delta0)
    while True:
        deltas.append(d)
        if d <= floor:
            break
        d = max(d / 4.0, floor)
    coeffs = []
    grads = []
    start = None
    P = None
    for d in deltas:
        P, rep, start = _solve(
            f, degree, x0, r, p, d, order, grad_tol, 80, start
        )
        coeffs.append(np.array(start))
        grads.append(rep.grad_norm)
    incs = tuple(
        float(np.max(np.abs(a - b), initial=0.0))
        for a, b in zip(coeffs[1:], coeffs[:-1])
    )
    converged = (incs[-1] < 1e-8) if incs else True
    return P, ContinuationReport(tuple(deltas), incs, tuple(grads), converged)


def half_ball_factor(f, poly, x0, r, p, delta, order=None):
    """||P||_{L^p(B(x0, r/2))} over the delta-inflated weighted size of f.

    For the minimizer this is at most 2 (convexity halving plus minimality)."""
    obj = WeightedObjective(f, poly.degree_bound, x0, r, p, delta, order)
    denom = obj.value(np.zeros(len(obj.idx))) ** (1.0 / p)
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    num = lp_norm_on_ball(poly, BallSpec(tuple(x0), r / 2.0), p)
    return num / denom
