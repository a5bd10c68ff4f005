"""Corpus errors"""

from app.terms.errors import LabError


class CorpusError(LabError):
    """Oracle size limit exceeded or a malformed CNF fixture."""
