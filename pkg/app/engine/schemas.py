"""Engine schemas"""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from app.config.settings import settings
from app.engine.enums import Port
from app.reader.formatting import format_answer


class TraceEvent(BaseModel):
    """
    One port event. Serialised as a JSON line with the fields
    port, node, goal and payload; `term` keeps the goal as a term in memory.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    port: Port
    node: int
    goal: str
    payload: str | None = None
    term: Any = Field(default=None, exclude=True, repr=False)

    def to_json(self) -> str:
        return self.model_dump_json()


class Limits(BaseModel):
    """Resource limits for one run."""
    max_steps: int = Field(default_factory=lambda: settings.MAX_STEPS, gt=0)
    max_solutions: int | None = Field(default=None, gt=0)
    record_trace: bool = True


class Answer(BaseModel):
    """Bindings of the named query variables plus still-blocked goals."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    bindings: dict[str, Any] = Field(default_factory=dict)
    residue: list[Any] = Field(default_factory=list)

    def text(self) -> str:
        return format_answer(self.bindings, self.residue)


class SolveResult(BaseModel):
    """Answers and trace of a run, complete or up to an error."""
    answers: list[Answer] = Field(default_factory=list)
    trace: list[TraceEvent] = Field(default_factory=list)
    steps: int = 0
    exhausted: bool = False
