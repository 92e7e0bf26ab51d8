"""Fractional Musielak-Orlicz modulars, Luxemburg norms and their s -> 1 limits.
"""

__version__ = "0.1.0a0"
