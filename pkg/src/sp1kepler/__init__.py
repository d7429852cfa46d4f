"""Quaternionic Kepler systems: exact Poisson-algebraic verification and flow.

Subpackages by layer: quat (arithmetic substrate), jordan (hermitian Jordan
algebra), conformal (the abstract Lie algebra), poisson (canonical bracket,
exact on quadratics), realization (the observable family and its closed
quadratic identities), sternberg (cone-side geometry and pullbacks),
dynamics (integration and conserved-quantity monitoring), cli (driver).
"""

__version__ = "0.1.0"

__all__ = [
    "quat",
    "jordan",
    "conformal",
    "poisson",
    "realization",
    "sternberg",
    "dynamics",
]
