"""Determinant-method covers of rational points of bounded height on projective hypersurfaces."""
__version__ = "0.1.0"
