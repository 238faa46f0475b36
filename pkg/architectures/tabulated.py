"""
Fully tabulated architectures: the representation space is an explicit
FiniteMetricSpace and S = A o Gamma is a lookup table over its points.
"""

from __future__ import annotations

from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from schemas.meanings import VectorMeaning
from semantics.errors import MalformedCommand, UnknownToken
from semantics.spaces import EuclideanSpace, FiniteMetricSpace, PseudometricSpace

from .base import (
    GroundingArchitecture,
    Locus,
    Mechanism,
    Perturbation,
    ProvenanceRecord,
    ThreatModel,
    identity_alignment,
)


class FiniteIndexSpace(PseudometricSpace):
    """Point indices of a FiniteMetricSpace, measured by its matrix."""

    def __init__(self, space: FiniteMetricSpace) -> None:
        self.space = space
        self._d = space.matrix()
        self.name = f"finite[{space.size}]"

    def distance(self, a: Any, b: Any) -> float:
        return float(self._d[int(a), int(b)])

    def contains(self, point: Any) -> bool:
        return isinstance(point, (int, np.integer)) and 0 <= int(point) < self.space.size


def table_neighbour_threat(space: FiniteMetricSpace) -> ThreatModel:
    """Move a point to another point at distance <= eps; enumerable."""
    d = space.matrix()

    def _neighbours(rep: int, scale: float) -> List[int]:
        return [j for j in range(space.size) if j != rep and d[rep, j] <= scale]

    def _move(j: int, scale: float) -> Perturbation:
        return Perturbation("table_neighbour", scale, lambda r, j=j: j, label=f"->{space.points[j]}")

    def draw(rep: int, scale: float, rng: np.random.Generator) -> Perturbation:
        candidates = _neighbours(int(rep), scale)
        if not candidates:
            return Perturbation("table_neighbour", scale, lambda r: r, label="stay")
        return _move(candidates[int(rng.integers(len(candidates)))], scale)

    def enumerate_moves(rep: int, scale: float) -> List[Perturbation]:
        return [_move(j, scale) for j in _neighbours(int(rep), scale)]

    return ThreatModel("table_neighbour", draw, enumerate_moves)


class TabulatedArchitecture(GroundingArchitecture):
    """Architecture whose encoder maps each surface string to a point index.

    If `first_token_mechanism` is given, switching it off makes the encoder
    read only the first token of a command.
    """

    def __init__(
        self,
        name: str,
        space: FiniteMetricSpace,
        table: Sequence[Any],
        lookup: Mapping[str, int],
        meaning_space: Optional[PseudometricSpace] = None,
        first_token_mechanism: Optional[str] = None,
        provenance: Optional[ProvenanceRecord] = None,
    ) -> None:
        if len(table) != space.size:
            raise ValueError(f"table has {len(table)} entries for a space of {space.size} points")
        for surface, idx in lookup.items():
            if not 0 <= idx < space.size:
                raise ValueError(f"lookup {surface!r} -> {idx} is outside the space")
        self.space = space
        self.table: Tuple[Any, ...] = tuple(table)
        self.lookup: Dict[str, int] = dict(lookup)
        alphabet = {tok for surface in self.lookup for tok in surface.split()}
        mechanisms = []
        if first_token_mechanism is not None:
            mechanisms.append(Mechanism(
                id=first_token_mechanism,
                locus=Locus.ENCODE,
                description="process tokens after the first",
            ))
        self._truncating = first_token_mechanism
        super().__init__(
            name=name,
            alphabet=alphabet,
            encode=self._lookup_encode,
            conceptualize=self._table_conceptualize,
            align=identity_alignment,
            representation_space=FiniteIndexSpace(space),
            meaning_space=meaning_space or EuclideanSpace(),
            mechanisms=mechanisms,
            provenance=provenance,
            mode="tabulated",
        )

    def _lookup_encode(self, tokens: Tuple[str, ...], active: FrozenSet[str]) -> int:
        if self._truncating is not None and self._truncating not in active:
            tokens = tokens[:1]
        key = " ".join(tokens)
        if key not in self.lookup:
            for tok in tokens:
                if tok not in self.alphabet:
                    raise UnknownToken(tok)
            raise MalformedCommand(f"no table entry for {key!r}")
        return self.lookup[key]

    def _table_conceptualize(self, rep: int, active: FrozenSet[str]) -> Any:
        return self.table[int(rep)]

    def threat_model(self) -> ThreatModel:
        return table_neighbour_threat(self.space)

    def all_representations(self) -> List[Tuple[str, int]]:
        return [(label, i) for i, label in enumerate(self.space.points)]


def tabulated_from_points(
    coords: Sequence[Sequence[float]],
    meanings: Sequence[Sequence[float]],
    labels: Optional[Sequence[str]] = None,
) -> TabulatedArchitecture:
    """Euclidean finite space with one vector meaning per point; each label is its own command."""
    space = FiniteMetricSpace.from_points(coords, labels)
    table = [VectorMeaning.of(m) for m in meanings]
    lookup = {label: i for i, label in enumerate(space.points)}
    return TabulatedArchitecture("tabulated", space, table, lookup)
