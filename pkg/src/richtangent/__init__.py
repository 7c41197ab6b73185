"""Finite-depth constructions of locally rich spaces and sets, with numeric
certificates for their tangent, separation, dimension and porosity bounds."""

__version__ = "0.1.0"
