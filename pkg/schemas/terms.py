from __future__ import annotations

from typing import Optional, Tuple
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Atom(BaseModel):
    """Atomic surface symbol with its sort tag"""
    model_config = ConfigDict(frozen=True)

    name: str = Field(..., min_length=1, description="Atom identifier")
    sort: str = Field(..., min_length=1, description="Type tag (e.g. COLOR, DIRECTION)")


class Constructor(BaseModel):
    """Typed constructor f: arg_sorts -> result_sort"""
    model_config = ConfigDict(frozen=True)

    name: str = Field(..., min_length=1, description="Constructor identifier")
    arg_sorts: Tuple[str, ...] = Field(..., description="Ordered argument sorts")
    result_sort: str = Field(..., min_length=1, description="Result sort")

    @field_validator("arg_sorts")
    @classmethod
    def _nonzero_arity(cls, v: Tuple[str, ...]) -> Tuple[str, ...]:
        if len(v) < 1:
            raise ValueError("constructor arity must be >= 1")
        return v

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)


class Term(BaseModel):
    """Either a leaf holding an Atom or a constructor node over child terms.

    Equality is structural. Well-typedness of nodes is checked at construction.
    """
    model_config = ConfigDict(frozen=True)

    atom: Optional[Atom] = None
    constructor: Optional[Constructor] = None
    children: Tuple["Term", ...] = ()

    @model_validator(mode="after")
    def _shape(self) -> "Term":
        if (self.atom is None) == (self.constructor is None):
            raise ValueError("term must be exactly one of leaf(atom) or node(constructor, children)")
        if self.atom is not None and self.children:
            raise ValueError("leaf terms carry no children")
        if self.constructor is not None:
            got = tuple(c.sort for c in self.children)
            if got != self.constructor.arg_sorts:
                # imported lazily: schemas must not depend on semantics at import time
                from semantics.errors import SortMismatch
                raise SortMismatch(self.constructor.name, self.constructor.arg_sorts, got)
        return self

    @classmethod
    def leaf(cls, atom: Atom) -> "Term":
        return cls(atom=atom)

    @classmethod
    def node(cls, constructor: Constructor, *children: "Term") -> "Term":
        return cls(constructor=constructor, children=tuple(children))

    @property
    def is_leaf(self) -> bool:
        return self.atom is not None

    @property
    def sort(self) -> str:
        return self.atom.sort if self.atom is not None else self.constructor.result_sort

    def surface(self) -> Tuple[str, ...]:
        """In-order atom sequence."""
        if self.atom is not None:
            return (self.atom.name,)
        out: list[str] = []
        for child in self.children:
            out.extend(child.surface())
        return tuple(out)

    def surface_text(self) -> str:
        return " ".join(self.surface())

    def depth(self) -> int:
        if self.atom is not None:
            return 1
        return 1 + max(c.depth() for c in self.children)

    def atoms(self) -> Tuple[Atom, ...]:
        if self.atom is not None:
            return (self.atom,)
        out: list[Atom] = []
        for child in self.children:
            out.extend(child.atoms())
        return tuple(out)

    def subterms(self) -> Tuple["Term", ...]:
        """Post-order, without duplicates."""
        seen: dict["Term", None] = {}
        self._collect(seen)
        return tuple(seen)

    def _collect(self, seen: dict) -> None:
        for child in self.children:
            child._collect(seen)
        seen.setdefault(self, None)

    def render(self) -> str:
        if self.atom is not None:
            return self.atom.name
        return f"{self.constructor.name}({', '.join(c.render() for c in self.children)})"

    def __str__(self) -> str:
        return self.render()


Term.model_rebuild()
