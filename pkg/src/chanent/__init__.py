"""Entropic functionals of bipartite and multipartite quantum channels."""

__version__ = "0.1.0"
