"""Numerical toolkit for weighted square functions and maximal operators on the unit ball of C^n."""

__version__ = "0.1.0"
