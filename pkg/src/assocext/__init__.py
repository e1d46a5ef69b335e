"""Extensions and deformations of associative algebras via codifferentials."""

from .coalgebra import (
    C,
    CW,
    Bidegree,
    BasisCoderivation,
    Cochain,
    GradedSpace,
    SplitSpace,
    bracket,
    circle_product,
    phi,
    psi,
)
from .linalg import Matrix, Subspace

__all__ = [
    "C",
    "CW",
    "Bidegree",
    "BasisCoderivation",
    "Cochain",
    "GradedSpace",
    "SplitSpace",
    "Matrix",
    "Subspace",
    "bracket",
    "circle_product",
    "phi",
    "psi",
]
