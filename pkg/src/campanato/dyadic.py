"""Weighted one-sided tail operators on dyadic sequences.

A ``DyadicSequence`` holds values X_j on an integer window [j_min, j_max] and
is treated as zero outside.  The tail operator

    (S_{alpha,q} X)_j = 2^{j alpha} ( sum_{i >= j} (2^{-i alpha} X_i)^q )^{1/q}

(with the sup over i >= j of 2^{(j-i) alpha} X_i when q = inf) is exact on the
window because the sequences are finitely supported.  q in (0, inf] is allowed.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DyadicSequence",
    "s_op",
    "scaling_identity_check",
    "lemma_bound_check",
]


@dataclass(frozen=True)
class DyadicSequence:
    """Nonnegative values indexed by j = j_min, ..., j_min + len - 1."""

    j_min: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "values", np.asarray(self.values, dtype=float)
        )
        if self.values.ndim != 1:
            raise ValueError("sequence values must be one-dimensional")
        if (self.values < 0).any():
            raise ValueError("sequence values must be nonnegative")

    @property
    def j_max(self):
        return self.j_min + len(self.values) - 1

    @property
    def indices(self):
        return np.arange(self.j_min, self.j_min + len(self.values))

    def __getitem__(self, j):
        if j < self.j_min or j > self.j_max:
            return 0.0
        return float(self.values[j - self.j_min])

    def sup(self):
        return float(self.values.max()) if len(self.values) else 0.0

    def lq(self, q):
        """l^q size of the sequence (q = inf gives the sup)."""
        if np.isinf(q):
            return self.sup()
        return float((self.values**q).sum() ** (1.0 / q))


def s_op(X, alpha, q):
    """Apply the tail operator S_{alpha,q}; exact for the finite window."""
    j = X.indices.astype(float)
    t = 2.0 ** (-alpha * j) * X.values
    if np.isinf(q):
        out = 2.0 ** (alpha * j) * np.maximum.accumulate(t[::-1])[::-1]
    else:
        tails = np.cumsum((t**q)[::-1])[::-1]
        out = 2.0 ** (alpha * j) * tails ** (1.0 / q)
    return DyadicSequence(X.j_min, out)


def scaling_identity_check(X, alpha, beta, q):
    """Max relative gap in the shift identity
    2^{beta j} (S_{alpha,q} X)_j = (S_{alpha+beta,q} {2^{beta i} X_i})_j."""
    j = X.indices.astype(float)
    lhs = 2.0 ** (beta * j) * s_op(X, alpha, q).values
    shifted = DyadicSequence(X.j_min, 2.0 ** (beta * j) * X.values)
    rhs = s_op(shifted, alpha + beta, q).values
    denom = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1e-300)
    return float(np.max(np.abs(lhs - rhs) / denom))


def lemma_bound_check(X, alpha, beta, p, q):
    """Composition bound: for beta < alpha and 1 <= p <= q,
    S_{beta,q}(S_{alpha,p} X) <= S_{beta,q} X / (1 - 2^{beta-alpha}) pointwise.

    The check itself accepts any 0 < p <= q, but the stated constant is a
    theorem only for p >= 1.  The inner ``p``-sum reduces to a 1-sum of
    ``p``-th powers, which gives the constant (1 - 2^{-(alpha-beta)p})^{-1/p};
    that is dominated by 1/(1 - 2^{beta-alpha}) exactly when p >= 1.  For
    p < 1 the bound can genuinely fail (e.g. X = (0, 1), alpha = 2, beta = 1,
    p = q = 1/2 yields ratio 2.914 against constant 2), in which case ``ok``
    honestly reports False.

    Returns the two sides, the worst ratio, and the constant."""
    if not beta < alpha:
        raise ValueError("composition bound needs beta < alpha")
    if not 0 < p <= q:
        raise ValueError("composition bound needs 0 < p <= q")
    inner = s_op(X, alpha, p)
    lhs = s_op(inner, beta, q)
    rhs = s_op(X, beta, q)
    bound = 1.0 / (1.0 - 2.0 ** (beta - alpha))
    mask = rhs.values > 0
    ratio = float(np.max(lhs.values[mask] / rhs.values[mask])) if mask.any() else 0.0
    return {
        "lhs": lhs,
        "rhs": rhs,
        "max_ratio": ratio,
        "bound": bound,
        "ok": ratio <= bound + 1e-9,
    }
