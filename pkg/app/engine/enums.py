"""
    Engine enums
"""

from enum import Enum


class Mode(str, Enum):
    """How backjumping is executed."""
    ISO = "iso"
    NATIVE_BJ = "native-bj"


class Port(str, Enum):
    """Trace event ports."""
    CALL = "Call"
    EXIT = "Exit"
    REDO = "Redo"
    FAIL = "Fail"
    THROW = "Throw"
    CATCH = "Catch"
    BACKJUMP = "Backjump"
    BLOCK = "Block"
    UNBLOCK = "Unblock"
    ANSWER = "Answer"


class StepOutcome(str, Enum):
    """Result of one engine step."""
    RUNNING = "running"
    ANSWER = "answer"
    EXHAUSTED = "exhausted"
