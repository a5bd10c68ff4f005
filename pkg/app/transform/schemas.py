"""Transform schemas"""

import re

from pydantic import BaseModel, Field, field_validator, model_validator

from app.transform.enums import IdPolicy

INDICATOR_PATTERN = re.compile(r"^[^/\s]+/\d+$")

# (predicate indicator, 1-based clause index)
ClauseKey = tuple[str, int]


class BackjumpSpec(BaseModel):
    """
    What a transformation rewrites and how.

    An empty `target_procedures` means every procedure of the program.
    `split_points` maps a clause to the number of goals kept before the
    catch (the length of B0).
    """
    target_procedures: set[str] = Field(default_factory=set)
    id_policy: IdPolicy = IdPolicy.FRESH
    id_arg: int | None = Field(default=None, ge=1)
    split_points: dict[ClauseKey, int] = Field(default_factory=dict)
    exempt_clauses: set[ClauseKey] = Field(default_factory=set)
    dynamic_exempt_clauses: set[ClauseKey] = Field(default_factory=set)

    @field_validator("target_procedures")
    @classmethod
    def validate_indicators(cls, value: set[str]) -> set[str]:
        for indicator in value:
            if not INDICATOR_PATTERN.match(indicator):
                raise ValueError(f"not a predicate indicator: {indicator!r}")
        return value

    @field_validator("split_points", "exempt_clauses", "dynamic_exempt_clauses")
    @classmethod
    def validate_clause_keys(cls, value):
        for indicator, index in value:
            if not INDICATOR_PATTERN.match(indicator) or index < 1:
                raise ValueError(f"not a clause designation: {indicator}:{index}")
        return value

    @field_validator("split_points")
    @classmethod
    def validate_splits(cls, value: dict[ClauseKey, int]) -> dict[ClauseKey, int]:
        for (indicator, index), split in value.items():
            if split < 1:
                raise ValueError(f"split of {indicator}:{index} must be at least 1")
        return value

    @model_validator(mode="after")
    def validate_policy(self) -> "BackjumpSpec":
        if self.id_policy is IdPolicy.FROM_ARG and self.id_arg is None:
            raise ValueError("the from-arg policy needs id_arg")
        if self.dynamic_exempt_clauses and self.id_policy is not IdPolicy.FRESH:
            raise ValueError("dynamic-exempt clauses need the fresh id policy")
        if self.exempt_clauses & self.dynamic_exempt_clauses:
            raise ValueError("a clause cannot be both exempt and dynamic-exempt")
        return self

    def targets(self, indicator: str) -> bool:
        return not self.target_procedures or indicator in self.target_procedures
