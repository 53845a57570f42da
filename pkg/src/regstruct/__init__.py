"""Symbolic and numerical tools for regularity structures of singular SPDEs."""

from .polys import Poly, parse_poly
from .symbols import (
    ONE,
    Degree,
    DecoratedTree,
    Forest,
    Grading,
    NodeLabel,
    TreePolynomial,
    canonicalize,
    degree,
    plant,
    project_extended,
    tree_product,
    xi,
)
from .notation import bracket, format_tree, parse_tree

__version__ = "0.1.0"
