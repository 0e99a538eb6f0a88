"""Exact computations on Hessian loci of cubic hypersurfaces."""

__version__ = "0.1.0"
