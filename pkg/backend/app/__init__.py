"""
Localized Sums Lab - simulation and verification of localized partial-sum maxima
"""

__version__ = "1.0.0"
