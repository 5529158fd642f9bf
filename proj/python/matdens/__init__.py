"""Exact submatrix pattern densities, extremal searches and flag-algebra certificates.

Matrices are given as inline strings ("0 0;0 1") or nested lists and returned as
nested lists; exact values are fractions.Fraction.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
