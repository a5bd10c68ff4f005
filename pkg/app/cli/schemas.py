"""CLI schemas"""

from pathlib import Path

from pydantic import BaseModel, Field

from app.engine.enums import Mode
from app.engine.schemas import Limits


class RunConfig(BaseModel):
    """Everything `run` needs: what to run, how, and where the trace goes."""
    program: Path
    query: str = Field(min_length=1)
    mode: Mode = Mode.ISO
    trace: Path | None = None
    limits: Limits = Field(default_factory=Limits)
