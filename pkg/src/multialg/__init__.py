"""Multialgebras: finite hyperfields and multirings, multipolynomials with
Euclidean division, and quantifier elimination for algebraically closed
multifields."""

from multialg.structures import (
    FiniteMultiring,
    Multigroup,
    StructureError,
    hp,
    kaleidoscope,
    krasner,
    make_builtin,
    signs,
    zmod,
)

__all__ = [
    "FiniteMultiring",
    "Multigroup",
    "StructureError",
    "hp",
    "kaleidoscope",
    "krasner",
    "make_builtin",
    "signs",
    "zmod",
]

__version__ = "0.1.0"
