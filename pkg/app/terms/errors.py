"""Base error of the lab"""


class LabError(Exception):
    """Root of every error raised by the lab packages."""

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def __str__(self) -> str:
        return self.message


class TermDepthError(LabError):
    """A term is nested too deeply to traverse, usually because it is cyclic."""

    def __init__(self, limit: int):
        super().__init__(f"term nesting exceeds {limit} levels")
        self.limit = limit
