"""Exact computations in filtered Boolean powers of finite simple
non-abelian Mal'cev algebras: finite-algebra analysis, the clopen algebra
of Cantor space with punctured-space extensions, Boolean-power elements
and congruences, the semidirect automorphism group, amalgamation and
weak homogeneity, finite-rank free algebras, and homeomorphism
factorizations."""

__version__ = "0.1.0"
