"""Reader errors"""

from app.terms.errors import LabError


class PrologSyntaxError(LabError):
    """Malformed source text, located by line and column (both 1-based)."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"syntax error at line {line}, column {column}: {message}")
        self.line = line
        self.column = column
