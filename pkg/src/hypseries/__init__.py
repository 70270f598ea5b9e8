"""Closed-form power series of hypergeometric type.

Exact-arithmetic engine that discovers holonomic differential and recurrence
equations for expressions built from elementary functions, solves the
recurrences for m-fold hypergeometric terms, and assembles closed-form power,
Laurent and Puiseux series.  Functions outside the holonomic class are handled
through quadratic differential equations and recursive normal forms, which
also power exact zero-equivalence certification.
"""

from .polys import Factor, Poly, RatFunc, factor_rational, integer_roots, rational_roots

__all__ = [
    "Factor",
    "Poly",
    "RatFunc",
    "factor_rational",
    "integer_roots",
    "rational_roots",
]

__version__ = "0.1.0"
