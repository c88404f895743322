"""Constructions in two or more dimensions."""

from .grid import build_grid, splus_grid
from .robust import BuildReport, build_hardy, build_robust_dd, splus_dd
from .treecover import TreeCover, shifted_quadtree_cover
from .wspd import ft_spanner, wspd

__all__ = [
    "BuildReport",
    "TreeCover",
    "build_grid",
    "build_hardy",
    "build_robust_dd",
    "ft_spanner",
    "shifted_quadtree_cover",
    "splus_dd",
    "splus_grid",
    "wspd",
]
