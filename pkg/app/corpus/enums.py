"""
    Corpus enums
"""

from enum import Enum


class EncodingStyle(str, Enum):
    """Program family a CNF is encoded for."""
    PLAIN = "plain"
    LEVELED = "leveled"
