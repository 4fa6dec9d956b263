"""Indecomposable summands of tensor products of simple SL3 modules for p = 2, 3,
with exact character verification and a quiver-algebra workbench for T(4,3)."""

from .characters import (
    Character,
    UnknownTiltingCharacter,
    WeylBasisExpr,
    into_simple_basis,
    into_weyl_basis,
    multiply,
    simple_character,
    tilting_character,
    weyl_character,
)
from .decompose import (
    Decomposition,
    Summand,
    canonicalize,
    is_indecomposable_pair,
    is_tilting_pair,
    parse_summands,
    tensor_decompose,
    verify_decomposition,
)
from .family import M, Atom, family_character
from .weights import Weight, dot_linked, linkage_classes, steinberg_digits, tilting_digits

__all__ = [
    "Atom", "Character", "Decomposition", "M", "Summand", "UnknownTiltingCharacter", "Weight",
    "WeylBasisExpr", "canonicalize", "dot_linked", "family_character", "into_simple_basis",
    "into_weyl_basis", "is_indecomposable_pair", "is_tilting_pair", "linkage_classes", "multiply",
    "parse_summands", "simple_character", "steinberg_digits", "tensor_decompose", "tilting_character",
    "tilting_digits", "verify_decomposition", "weyl_character",
]
