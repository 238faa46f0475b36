"""
Grounding architecture: encoder -> conceptualizer -> alignment, with named
internal mechanisms that can be switched off for ablation, and provenance
metadata for the authenticity audit.
"""

from __future__ import annotations

from enum import Enum
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from schemas.terms import Term
from semantics.errors import NegativeScale, UnknownMechanism, UnknownToken
from semantics.spaces import PseudometricSpace


class Locus(str, Enum):
    """Pipeline stage a mechanism lives in"""
    ENCODE = "encode"
    CONCEPTUALIZE = "conceptualize"
    ALIGN = "align"


class Mechanism(BaseModel):
    """Named, toggleable internal mechanism"""
    id: str = Field(..., min_length=1, description="Mechanism identifier")
    locus: Locus = Field(..., description="Stage the mechanism lives in")
    description: str = Field("", description="What switching it off does")
    state: Literal["on", "off"] = Field("on", description="Default state")


class ProvenanceRecord(BaseModel):
    """How the architecture's mappings came to be (authenticity bookkeeping)"""
    g0_level: Literal["weak", "strong"] = Field(..., description="Authenticity level claimed")
    training_process: Optional[str] = Field(None, description="Descriptor of the acquisition process")
    acquired_components: List[Locus] = Field(default_factory=list, description="Stages acquired by learning")
    alignment_external: bool = Field(False, description="Alignment supplied by an outside measurement adapter")
    notes: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _strong_needs_history(self) -> "ProvenanceRecord":
        if self.g0_level == "strong" and (not self.acquired_components or not self.training_process):
            raise ValueError("g0_level=strong requires acquired components and a training process")
        return self

    def effective_level(self) -> Literal["weak", "strong"]:
        """An externally supplied alignment caps the claim at weak."""
        if self.alignment_external:
            return "weak"
        return self.g0_level


class Perturbation:
    """Member u of a threat model with scale eps(u)."""

    def __init__(self, family: str, scale: float, apply: Callable[[Any], Any], label: str = "") -> None:
        if scale < 0:
            raise NegativeScale(scale)
        self.family = family
        self.scale = float(scale)
        self._apply = apply
        self.label = label

    def __call__(self, rep: Any) -> Any:
        if self.scale == 0.0:
            return rep
        return self._apply(rep)

    def __repr__(self) -> str:
        return f"Perturbation({self.family}, scale={self.scale}{', ' + self.label if self.label else ''})"


def identity_perturbation(family: str = "identity") -> Perturbation:
    return Perturbation(family, 0.0, lambda r: r, label="identity")


class ThreatModel:
    """Named perturbation family.

    `draw(rep, scale, rng)` samples one perturbation of the given scale;
    `enumerate(rep, scale)` lists every admissible perturbation of scale <= eps
    when the family is finite (returns None otherwise).
    """

    def __init__(
        self,
        family: str,
        draw: Callable[[Any, float, np.random.Generator], Perturbation],
        enumerator: Optional[Callable[[Any, float], List[Perturbation]]] = None,
    ) -> None:
        self.family = family
        self._draw = draw
        self._enumerate = enumerator

    def draw(self, rep: Any, scale: float, rng: np.random.Generator) -> Perturbation:
        if scale < 0:
            raise NegativeScale(scale)
        if scale == 0:
            return identity_perturbation(self.family)
        return self._draw(rep, scale, rng)

    @property
    def enumerable(self) -> bool:
        return self._enumerate is not None

    def enumerate(self, rep: Any, scale: float) -> List[Perturbation]:
        if scale < 0:
            raise NegativeScale(scale)
        if self._enumerate is None:
            raise NotImplementedError(f"threat model {self.family!r} is not enumerable")
        return [identity_perturbation(self.family)] + list(self._enumerate(rep, scale))


EncodeFn = Callable[[Tuple[str, ...], FrozenSet[str]], Any]
ConceptualizeFn = Callable[[Any, FrozenSet[str]], Any]
AlignFn = Callable[[Any, str, str, FrozenSet[str]], Any]


def identity_alignment(concept: Any, k: str, t: str, active: FrozenSet[str]) -> Any:
    return concept


class GroundingArchitecture:
    """The encode -> conceptualize -> align pipeline.

    interpret(term) is by definition align(conceptualize(encode(surface(term)))).
    Stage callables receive the frozen set of active mechanism ids; ablation is a
    scoped override of that set and never mutates the architecture.
    """

    def __init__(
        self,
        name: str,
        alphabet: Iterable[str],
        encode: EncodeFn,
        conceptualize: ConceptualizeFn,
        align: AlignFn,
        representation_space: PseudometricSpace,
        meaning_space: PseudometricSpace,
        mechanisms: Sequence[Mechanism] = (),
        provenance: Optional[ProvenanceRecord] = None,
        mode: str = "unspecified",
        open_vocabulary: bool = False,
    ) -> None:
        self.name = name
        # open-vocabulary architectures pass unknown tokens through to the stages
        self.open_vocabulary = open_vocabulary
        self.alphabet: FrozenSet[str] = frozenset(alphabet)
        self._encode = encode
        self._conceptualize = conceptualize
        self._align = align
        self.representation_space = representation_space
        self.meaning_space = meaning_space
        self.mechanisms: Dict[str, Mechanism] = {}
        for m in mechanisms:
            if m.id in self.mechanisms:
                raise ValueError(f"duplicate mechanism {m.id!r}")
            self.mechanisms[m.id] = m
        self.provenance = provenance or ProvenanceRecord(g0_level="weak")
        self.mode = mode

    # mechanism bookkeeping

    @property
    def default_active(self) -> FrozenSet[str]:
        return frozenset(m.id for m in self.mechanisms.values() if m.state == "on")

    def check_mechanisms(self, ids: Iterable[str]) -> FrozenSet[str]:
        ids = frozenset(ids)
        for mid in sorted(ids):
            if mid not in self.mechanisms:
                raise UnknownMechanism(mid, list(self.mechanisms))
        return ids

    def active_without(self, off: Iterable[str] = ()) -> FrozenSet[str]:
        return self.default_active - self.check_mechanisms(off)

    # stages

    def encode(self, tokens: Sequence[str], off: Iterable[str] = ()) -> Any:
        return self._encode(tuple(tokens), self.active_without(off))

    def conceptualize(self, rep: Any, off: Iterable[str] = ()) -> Any:
        return self._conceptualize(rep, self.active_without(off))

    def align(self, concept: Any, k: str, t: str, off: Iterable[str] = ()) -> Any:
        return self._align(concept, k, t, self.active_without(off))

    def semantics(self, rep: Any, k: str, t: str, off: Iterable[str] = ()) -> Any:
        """S = A o Gamma applied to a representation."""
        active = self.active_without(off)
        return self._align(self._conceptualize(rep, active), k, t, active)

    def representation(self, term: Term, off: Iterable[str] = ()) -> Any:
        self._check_alphabet(term)
        return self._encode(term.surface(), self.active_without(off))

    def _check_alphabet(self, term: Term) -> None:
        if self.open_vocabulary:
            return
        for token in term.surface():
            if token not in self.alphabet:
                raise UnknownToken(token)

    # end-to-end

    def interpret_tokens(self, tokens: Sequence[str], k: str, t: str, off: Iterable[str] = ()) -> Any:
        active = self.active_without(off)
        rep = self._encode(tuple(tokens), active)
        return self._align(self._conceptualize(rep, active), k, t, active)

    def interpret(self, term: Term, k: str, t: str) -> Any:
        self._check_alphabet(term)
        return self.interpret_tokens(term.surface(), k, t)

    def interpret_under(self, term: Term, k: str, t: str, off_mechs: Iterable[str]) -> Any:
        self._check_alphabet(term)
        return self.scoped(off_mechs).interpret(term, k, t)

    def scoped(self, off_mechs: Iterable[str]) -> "ScopedArchitecture":
        return ScopedArchitecture(self, self.check_mechanisms(off_mechs))

    def perturb_and_interpret(self, rep: Any, u: Perturbation, k: str, t: str) -> Tuple[Any, Any]:
        """(S(r), S(u.r)) without re-running the encoder."""
        return self.semantics(rep, k, t), self.semantics(u(rep), k, t)

    def g0_level(self) -> Literal["weak", "strong"]:
        return self.provenance.effective_level()


class ScopedArchitecture:
    """Read-only view of an architecture with some mechanisms switched off."""

    def __init__(self, base: GroundingArchitecture, off: FrozenSet[str]) -> None:
        self.base = base
        self.off = off

    def interpret(self, term: Term, k: str, t: str) -> Any:
        self.base._check_alphabet(term)
        return self.base.interpret_tokens(term.surface(), k, t, off=self.off)

    def representation(self, term: Term) -> Any:
        return self.base.representation(term, off=self.off)

    def semantics(self, rep: Any, k: str, t: str) -> Any:
        return self.base.semantics(rep, k, t, off=self.off)
