"""Transform errors"""

from app.terms.errors import LabError


class TransformError(LabError):
    """A transformation cannot be applied as requested."""


class UnsupportedInputError(TransformError):
    """The input lies outside what a transformation is defined for."""


class NameClashError(TransformError):
    """The program already defines a predicate the transformation introduces."""

    def __init__(self, indicator: str):
        super().__init__(f"program already defines {indicator}")
        self.indicator = indicator
