"""Exact decomposition of symmetric powers of modular group representations.

The package splits H^0(P^d, O(n)) = Sym^n of a linear action of a finite
group over GF(p^e) into indecomposable summands, tracks them in a registry,
and checks the structural facts that make the graded family tame: polynomial
descriptions of the multiplicities, projective/free growth against the
ramification of the action, Brauer-character difference vanishing, and
Koszul-complex splitting.
"""

__version__ = "0.1.0"
