"""ptk: plegma families, thin-family combinatorics and certified norms."""

__version__ = "0.1.0"
