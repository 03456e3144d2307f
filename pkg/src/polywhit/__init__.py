"""Geometric RSK, Whittaker functions, log-gamma polymers and LPP laws."""

__version__ = "0.1.0"
