"""Compressed representations of square binary relations.

Four structures over the same query/set-operation interface: two
quadtree bitmap variants (plain and uniform-block), a wavelet tree over
the row bisection, and gap-plus-run Rice-coded adjacency lists.  A plain
adjacency-list type acts as the uncompressed reference implementation
and interchange format, and a generator module produces deterministic
synthetic datasets.  Hot loops run on a compiled extension when it is
available, with a pure-Python fallback (see `binrel.kernels`).
"""

from . import kernels
from .bitvec import RankBitVector
from .brwt import Brwt, CursorTable, build_brwt
from .datagen import GenSpec, generate
from .errors import DimensionMismatch, FormatError
from .k2 import K2Tree, K2TreeOnes, build_k2, build_k2ones
from .relation import PlainRelation, RangeQuery
from .ricerun import RiceRuns, encode_rice

__version__ = "0.1.0"

__all__ = [
    "Brwt",
    "CursorTable",
    "DimensionMismatch",
    "FormatError",
    "GenSpec",
    "K2Tree",
    "K2TreeOnes",
    "PlainRelation",
    "RangeQuery",
    "RankBitVector",
    "RiceRuns",
    "build_brwt",
    "build_k2",
    "build_k2ones",
    "encode_rice",
    "generate",
    "kernels",
]
