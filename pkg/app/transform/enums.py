"""
    Transform enums
"""

from enum import Enum


class Approach(str, Enum):
    """Available backjumping transformations."""
    APPROACH_1 = "1"
    APPROACH_1A = "1a"
    APPROACH_2 = "2"
    DBSIM = "dbsim"


class IdPolicy(str, Enum):
    """Where the backjump target identifier comes from."""
    FRESH = "fresh"
    FROM_ARG = "from-arg"
