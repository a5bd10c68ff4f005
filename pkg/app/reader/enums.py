"""
    Operator types for the reader
"""

from enum import Enum


class OperatorType(str, Enum):
    """Associativity of a fixed operator."""
    XFX = "xfx"
    XFY = "xfy"
    YFX = "yfx"
    FY = "fy"
    FX = "fx"
