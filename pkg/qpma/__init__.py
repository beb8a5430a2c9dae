"""
Jackknife quantile partially linear model averaging.
"""

__version__ = "0.1.0"
__author__ = "qpma contributors"

__all__ = ["__version__"]
