"""Exact computations with centers of enveloping algebras in characteristic p."""

__version__ = "0.1.0"
