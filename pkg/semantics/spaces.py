"""
Pseudometric spaces used for representations and meanings, plus the explicit
finite metric space consumed by the exact modulus oracle.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from schemas.meanings import LabelMeaning, VectorMeaning

# zero-diagonal / symmetry / triangle slack
TOLERANCE = 1e-9


class PseudometricSpace(ABC):
    """Point type descriptor plus a distance function."""

    name: str = "abstract"

    @abstractmethod
    def distance(self, a: Any, b: Any) -> float:
        ...

    def contains(self, point: Any) -> bool:
        return True


def _as_array(point: Any) -> np.ndarray:
    if isinstance(point, VectorMeaning):
        return point.as_array()
    return np.asarray(point, dtype=np.float64)


class EuclideanSpace(PseudometricSpace):
    """R^dim with the L2 metric; accepts VectorMeaning or raw arrays."""

    def __init__(self, dim: Optional[int] = None) -> None:
        self.dim = dim
        self.name = f"euclidean[{dim}]" if dim is not None else "euclidean"

    def distance(self, a: Any, b: Any) -> float:
        return float(np.linalg.norm(_as_array(a) - _as_array(b)))

    def contains(self, point: Any) -> bool:
        if not isinstance(point, (VectorMeaning, np.ndarray, list, tuple)):
            return False
        arr = _as_array(point)
        if arr.ndim != 1 or not np.all(np.isfinite(arr)):
            return False
        return self.dim is None or arr.shape[0] == self.dim


class DiscreteSpace(PseudometricSpace):
    """Discrete metric: 0 on equal points, 1 otherwise."""

    name = "discrete"

    def distance(self, a: Any, b: Any) -> float:
        return 0.0 if a == b else 1.0

    def contains(self, point: Any) -> bool:
        return isinstance(point, (LabelMeaning, str, int))


class PseudometricCheck(BaseModel):
    """Outcome of validate_pseudometric"""
    passed: bool
    reason: Optional[str] = Field(None, description="zero_diagonal | symmetry | triangle")
    violation: Optional[Tuple[int, ...]] = Field(None, description="First violating index tuple")


class FiniteMetricSpace(BaseModel):
    """Explicit finite point set with its full pairwise distance matrix."""

    points: List[str] = Field(..., description="Point labels")
    distances: List[List[float]] = Field(..., description="Pairwise distance matrix (row-major)")
    coordinates: Optional[List[List[float]]] = Field(None, description="Embedding used to build the matrix, if any")

    @model_validator(mode="after")
    def _dimensions(self) -> "FiniteMetricSpace":
        n = len(self.points)
        if len(self.distances) != n or any(len(row) != n for row in self.distances):
            raise ValueError(f"distance matrix must be {n}x{n}")
        if any(v < 0 for row in self.distances for v in row):
            raise ValueError("distances must be nonnegative")
        return self

    @property
    def size(self) -> int:
        return len(self.points)

    def matrix(self) -> np.ndarray:
        return np.asarray(self.distances, dtype=np.float64)

    def index(self, label: str) -> int:
        return self.points.index(label)

    def distance(self, i: int, j: int) -> float:
        return float(self.distances[i][j])

    @classmethod
    def from_points(cls, coords: Sequence[Sequence[float]], labels: Optional[Sequence[str]] = None) -> "FiniteMetricSpace":
        arr = np.asarray(coords, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[:, None]
        diff = arr[:, None, :] - arr[None, :, :]
        dist = np.sqrt((diff ** 2).sum(axis=-1))
        names = list(labels) if labels is not None else [f"p{i}" for i in range(len(arr))]
        return cls(points=names, distances=dist.tolist(), coordinates=arr.tolist())

    @classmethod
    def discrete(cls, n: int, labels: Optional[Sequence[str]] = None) -> "FiniteMetricSpace":
        dist = 1.0 - np.eye(n)
        names = list(labels) if labels is not None else [f"p{i}" for i in range(n)]
        return cls(points=names, distances=dist.tolist())


def validate_pseudometric(space: FiniteMetricSpace) -> PseudometricCheck:
    """Zero diagonal, symmetry, then triangle inequality over all (i, j, k).

    A triangle violation (i, j, k) means d(i, k) > d(i, j) + d(j, k).
    """
    d = space.matrix()
    n = d.shape[0]
    if n == 0:
        return PseudometricCheck(passed=True)

    diag = np.argwhere(np.abs(np.diag(d)) > TOLERANCE)
    if diag.size:
        i = int(diag[0][0])
        return PseudometricCheck(passed=False, reason="zero_diagonal", violation=(i, i))

    asym = np.argwhere(np.abs(d - d.T) > TOLERANCE)
    if asym.size:
        i, j = (int(v) for v in asym[0])
        return PseudometricCheck(passed=False, reason="symmetry", violation=(i, j))

    # viol[i, j, k] = d[i, k] > d[i, j] + d[j, k]
    viol = d[:, None, :] > d[:, :, None] + d[None, :, :] + TOLERANCE
    hits = np.argwhere(viol)
    if hits.size:
        i, j, k = (int(v) for v in hits[0])
        return PseudometricCheck(passed=False, reason="triangle", violation=(i, j, k))
    return PseudometricCheck(passed=True)
