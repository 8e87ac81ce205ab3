"""Multiscale oscillation norms, moment projections, and transport estimates.

Subpackage map:

- ``integration``: quadrature rules on balls in R^n (n = 1, 2)
- ``polynomials``: shifted-monomial polynomials, graded-lex bases, ball norms
- ``fields``: scalar fields (analytic registry + grid-backed) and their derivatives
- ``mollifier``: smooth compactly supported kernel, generalized means, moment
  projections, asymptotic polynomials, mollification
- ``oscillation``: normalized local polynomial-oscillation functionals
- ``minimal_poly``: weighted L^p minimal polynomials with delta-smoothing
- ``dyadic``: one-sided weighted tail operators on dyadic sequences
- ``norms``: multiscale seminorms/norms built from oscillation profiles
- ``transport``: characteristics-based linear transport solver
- ``harness``: a-priori estimate verification and worked examples
- ``cli``: command-line front end
"""

__version__ = "0.1.0"
