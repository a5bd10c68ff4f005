"""Coroutine models"""

from dataclasses import dataclass
from typing import TYPE_CHECKING

from app.terms.models import Compound, Term

if TYPE_CHECKING:
    from app.engine.models import CallFrame


@dataclass(frozen=True, slots=True)
class WhenAtom:
    """A delayed goal resident in the blocked part."""

    condition: Term
    goal: Term
    owner: "CallFrame | None" = None

    def as_term(self) -> Term:
        return Compound("when", (self.condition, self.goal))
