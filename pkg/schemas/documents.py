from __future__ import annotations

from typing import Dict, List, Literal, Optional, Tuple
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .meanings import Meaning


class AtomEntry(BaseModel):
    """Atom declaration, with stipulated roles when it lives in a rule base"""
    model_config = ConfigDict(extra="forbid")

    name: str = Field(..., min_length=1)
    sort: str = Field(..., min_length=1)
    roles: List[str] = Field(default_factory=list, description="Stipulated base role literals ('~X' negates X)")


class ConstructorEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field(..., min_length=1)
    arg_sorts: Tuple[str, ...]
    result_sort: str
    op: Optional[Literal["conj", "modify"]] = Field(None, description="Role operation (rule bases only)")


class RuleEntry(BaseModel):
    """Definitional rule: whatever is a `premise` is also a `conclusion`"""
    model_config = ConfigDict(extra="forbid")

    premise: str
    conclusion: str


class RuleBaseDocument(BaseModel):
    """Structured rule-base file: atoms with base roles, rules, constructors"""
    model_config = ConfigDict(extra="forbid")

    atoms: List[AtomEntry]
    rules: List[RuleEntry] = Field(default_factory=list)
    constructors: List[ConstructorEntry] = Field(default_factory=list)

    @model_validator(mode="after")
    def _references(self) -> "RuleBaseDocument":
        names = {a.name for a in self.atoms}
        for rule in self.rules:
            for ref in (rule.premise, rule.conclusion):
                if ref not in names:
                    raise ValueError(f"rule references undeclared atom {ref!r}")
        for c in self.constructors:
            if c.op is None:
                raise ValueError(f"constructor {c.name!r} needs an op (conj | modify)")
        return self


class GrammarDocument(BaseModel):
    """Grammar plus intended interpretation over a named semantic algebra"""
    model_config = ConfigDict(extra="forbid")

    atoms: List[AtomEntry]
    constructors: List[ConstructorEntry] = Field(default_factory=list)
    interpretation: Dict[str, Meaning] = Field(default_factory=dict)
    algebra: Literal["vector_add", "role_conjunction"] = "vector_add"
    dim: Optional[int] = Field(None, ge=1, description="Meaning dimension for vector_add")


class TensorEntry(BaseModel):
    shape: List[int]
    data: List[float] = Field(..., description="Row-major float64 values")

    @model_validator(mode="after")
    def _size(self) -> "TensorEntry":
        expected = 1
        for s in self.shape:
            expected *= s
        if expected != len(self.data):
            raise ValueError(f"tensor shape {self.shape} does not match {len(self.data)} values")
        return self


class WeightFile(BaseModel):
    """Serialized grid-world agent"""
    model_config = ConfigDict(extra="forbid")

    format_version: Literal[1] = 1
    widths: Dict[str, int] = Field(..., description="vocab, embed, hidden")
    seed: int
    vocab: List[str]
    tensors: Dict[str, TensorEntry]
    training: Optional[Dict[str, object]] = Field(None, description="Training config descriptor, if trained")
