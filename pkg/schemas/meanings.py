"""
Meaning points: finite real vectors, discrete labels, signed role sets, and the
designated bottom meaning for uninterpretable input.
"""

from __future__ import annotations

from typing import Annotated, Literal, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator


class VectorMeaning(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["vector"] = "vector"
    values: Tuple[float, ...] = Field(..., description="Coordinates")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    @classmethod
    def of(cls, values: Sequence[float]) -> "VectorMeaning":
        return cls(values=tuple(float(v) for v in values))


class LabelMeaning(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["label"] = "label"
    label: str


class RoleMeaning(BaseModel):
    """Finite set of signed role literals; negation is written with a leading '~'."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["roles"] = "roles"
    roles: Tuple[str, ...] = ()

    @field_validator("roles")
    @classmethod
    def _canonical(cls, v: Tuple[str, ...]) -> Tuple[str, ...]:
        return tuple(sorted(set(v)))

    @classmethod
    def of(cls, roles) -> "RoleMeaning":
        return cls(roles=tuple(roles))

    def as_set(self) -> frozenset[str]:
        return frozenset(self.roles)


class BottomMeaning(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["bottom"] = "bottom"


Meaning = Annotated[
    Union[VectorMeaning, LabelMeaning, RoleMeaning, BottomMeaning],
    Field(discriminator="kind"),
]

BOTTOM = BottomMeaning()


def describe(meaning) -> str:
    if isinstance(meaning, VectorMeaning):
        return "(" + ", ".join(f"{v:.4f}" for v in meaning.values) + ")"
    if isinstance(meaning, LabelMeaning):
        return meaning.label
    if isinstance(meaning, RoleMeaning):
        return "{" + ", ".join(meaning.roles) + "}"
    return "⊥"
