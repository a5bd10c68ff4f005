"""Engine models: goal cells, stack frames and the backjump target registry"""

from collections.abc import Callable
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from app.terms.models import Clause, Term

if TYPE_CHECKING:
    from app.coroutine.models import WhenAtom


@dataclass(eq=False, slots=True)
class Frame:
    """
    Base of every stack frame.

    `mark` is the trail position and `blocked` the blocked part at the time
    the frame was pushed; `height` is its index on the stack.
    """

    mark: int
    blocked: tuple["WhenAtom", ...]
    cont: "Goal | None"
    height: int = 0
    alive: bool = True


@dataclass(eq=False, slots=True)
class CallFrame(Frame):
    """
    Choice point of a user predicate call; pushed even when no alternative remains.

    `redone` is set while a Redo for the pending retry is already on the trace.
    """

    goal: Term = None
    node: int = 0
    clauses: list[Clause] = field(default_factory=list)
    index: int = 0
    exited: bool = False
    redone: bool = False

    @property
    def alternatives(self) -> int:
        return len(self.clauses) - self.index


@dataclass(eq=False, slots=True)
class CatchFrame(Frame):
    """catch/3 frame; active while its goal runs, inactive after the goal exits."""

    goal: Term = None
    catcher: Term = None
    handler: Term = None
    owner: CallFrame | None = None
    node: int = 0
    exited: bool = False
    redone: bool = False

    @property
    def active(self) -> bool:
        return self.alive and not self.exited


@dataclass(eq=False, slots=True)
class DisjFrame(Frame):
    """Right branch of a pending disjunction."""

    alternative: Term = None
    owner: CallFrame | None = None


@dataclass(eq=False, slots=True)
class IteFrame(Frame):
    """Else branch of an if-then-else whose condition is still running."""

    otherwise: Term = None
    owner: CallFrame | None = None


@dataclass(eq=False, slots=True)
class NegFrame(Frame):
    """Negation as failure; reached on backtracking means the inner goal failed."""

    goal: Term = None
    node: int = 0


@dataclass(frozen=True, slots=True)
class ExitCall:
    frame: CallFrame


@dataclass(frozen=True, slots=True)
class ExitCatch:
    frame: CatchFrame


@dataclass(frozen=True, slots=True)
class IteCommit:
    frame: IteFrame


@dataclass(frozen=True, slots=True)
class NegSucceeded:
    frame: NegFrame


Marker = ExitCall | ExitCatch | IteCommit | NegSucceeded


@dataclass(frozen=True, slots=True)
class Goal:
    """
    Cell of the active part, an immutable linked list.

    `owner` is the call whose clause body produced the goal; btid/2 and
    bt_target/1 register it as their target.
    """

    item: Term | Marker
    owner: CallFrame | None
    next: "Goal | None"


class TargetRegistry:
    """
    Backjump targets keyed by ground terms.

    A key may be registered again further down the same branch; lookup
    returns the newest live registration.
    """

    def __init__(self):
        self._targets: dict[Term, list[CallFrame]] = {}

    def register(self, key: Term, frame: CallFrame) -> Callable[[], None]:
        """Register `frame` under `key`; returns the action that withdraws it."""
        frames = self._targets.setdefault(key, [])
        frames.append(frame)

        def withdraw() -> None:
            frames.pop()
            if not frames:
                self._targets.pop(key, None)

        return withdraw

    def lookup(self, key: Term) -> CallFrame | None:
        for frame in reversed(self._targets.get(key, [])):
            if frame.alive:
                return frame
        return None

    def __contains__(self, key: Term) -> bool:
        return self.lookup(key) is not None

    def __len__(self) -> int:
        return sum(len(frames) for frames in self._targets.values())
