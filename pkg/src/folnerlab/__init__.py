"""Computational laboratory for amenability, isoperimetry and percolation on groups."""

from .groups import (
    GeneratorMultiset,
    GroupContext,
    GroupElement,
    inv,
    mul,
    multiset_power,
    parse_group,
    parse_multiset,
    symmetrize,
)

__version__ = "0.1.0"
