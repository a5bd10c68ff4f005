"""
    Coroutine enums
"""

from enum import Enum


class UnblockOrder(str, Enum):
    """Order in which simultaneously woken goals are run."""
    PRESERVE = "preserve"
    REVERSE = "reverse"
