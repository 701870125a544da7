"""Exact invariants of symplectic quotient singularities V/G.

Conjugacy data and rank-filtered graded centers of finite symplectic groups,
orbifold Poincare polynomials, Molien series and invariant bases, smooth and
truncated Poisson cohomology, and second-order deformation extensions.
"""

__version__ = "0.1.0"
