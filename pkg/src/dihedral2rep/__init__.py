"""Dihedral 2-representations built from bipartite graphs via zigzag algebras."""

__version__ = "0.1.0"
