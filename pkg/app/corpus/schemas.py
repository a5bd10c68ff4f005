"""Corpus schemas"""

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.engine.schemas import TraceEvent

# (polarity, variable)
Literal = tuple[bool, str]

# One truth value per CNF variable, in `Cnf.variables` order
Assignment = tuple[bool, ...]


class Cnf(BaseModel):
    """
    A formula in conjunctive normal form.

    Clauses may be empty; an empty clause makes the formula unsatisfiable.
    """
    model_config = ConfigDict(frozen=True)

    variables: tuple[str, ...] = ()
    clauses: tuple[tuple[Literal, ...], ...] = ()

    @model_validator(mode="after")
    def validate_variables(self) -> "Cnf":
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate CNF variable")
        known = set(self.variables)
        for clause in self.clauses:
            for _, variable in clause:
                if variable not in known:
                    raise ValueError(f"literal over undeclared variable {variable!r}")
        return self

    def satisfied_by(self, values: dict[str, bool]) -> bool:
        return all(any(values[variable] == polarity for polarity, variable in clause) for clause in self.clauses)


class AnswerRecord(BaseModel):
    """
    An engine answer seen as a partial assignment.

    `assignment` holds the variables the answer binds; the ones it leaves
    unbound may take either value.
    """
    bindings: dict[str, str] = Field(default_factory=dict)
    assignment: dict[str, bool] = Field(default_factory=dict)

    def instances(self, variables: tuple[str, ...]) -> list[dict[str, bool]]:
        """Every total assignment over `variables` this answer stands for."""
        instances = [{}]
        for variable in variables:
            if variable in self.assignment:
                values = [self.assignment[variable]]
            else:
                values = [False, True]
            instances = [{**partial, variable: value} for partial in instances for value in values]
        return instances

    def covers(self, values: dict[str, bool]) -> bool:
        return all(values[variable] == value for variable, value in self.assignment.items())


class Verdict(BaseModel):
    """Soundness and completeness of a program's answers against the oracle."""
    sound: bool
    complete: bool
    unsound: list[dict[str, bool]] = Field(default_factory=list)
    missing: list[dict[str, bool]] = Field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.sound and self.complete


class Divergence(BaseModel):
    """First position where two traces differ; a missing side means that trace ended."""
    index: int
    left: TraceEvent | None = None
    right: TraceEvent | None = None

    def describe(self) -> str:
        def line(event: TraceEvent | None) -> str:
            if event is None:
                return "<end of trace>"
            text = f"{event.port.value} #{event.node} {event.goal}"
            return f"{text} [{event.payload}]" if event.payload else text

        return f"traces diverge at event {self.index}\n  a: {line(self.left)}\n  b: {line(self.right)}"
