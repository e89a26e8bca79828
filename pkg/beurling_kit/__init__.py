"""
Beurling Kit - sampling theorems for band-limited functions
Convex spectral bodies, band-limited test functions, sampling sets and the
verification engine built on them
"""

__version__ = "0.1.0"
