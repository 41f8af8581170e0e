"""2D DG spectral-element solver for hyperbolic wave systems with a
stabilized perfectly matched layer."""

__version__ = "0.1.0"
