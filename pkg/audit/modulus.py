"""
Exact minimal oscillation on finite metric spaces and modulus property checks.

Curves are step functions on an ascending grid; a query between grid points
takes the value at the largest grid point <= the query (right-continuous).
"""

from __future__ import annotations

import math
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from semantics.errors import ConfigError, GridTooCoarse
from semantics.spaces import EuclideanSpace, FiniteMetricSpace, PseudometricSpace
from utils.logger import logger


class ModulusCurve(BaseModel):
    """omega on a grid of scales; +inf allowed"""
    model_config = ConfigDict(ser_json_inf_nan="constants")

    grid: List[float] = Field(..., description="Ascending scales starting at 0")
    values: List[float] = Field(..., description="omega(eps) per grid point")

    @model_validator(mode="after")
    def _shape(self) -> "ModulusCurve":
        if len(self.grid) != len(self.values):
            raise ValueError("grid/values length mismatch")
        if not self.grid or self.grid[0] != 0.0:
            raise ValueError("grid must start at 0")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("grid must be strictly ascending")
        return self

    @property
    def is_monotone(self) -> bool:
        return all(b >= a for a, b in zip(self.values, self.values[1:]))

    def at(self, scale: float) -> float:
        return evaluate(self, scale)

    def scaled(self, factor: float) -> "ModulusCurve":
        return ModulusCurve(grid=list(self.grid), values=[v * factor for v in self.values])


class ModulusCheck(BaseModel):
    passed: bool
    reason: Optional[str] = None
    witness: Optional[Tuple[int, int]] = Field(None, description="Violating pair (i, j)")
    gap: Optional[float] = Field(None, description="Oscillation minus bound at the witness")


class VanishingCheck(BaseModel):
    passed: bool
    threshold: float = Field(..., description="Half the image diameter")
    scale_values: List[Tuple[float, float]]


def evaluate(curve: ModulusCurve, scale: float) -> float:
    """Value at the largest grid point <= scale."""
    if scale < 0:
        raise ValueError(f"scale must be >= 0, got {scale}")
    idx = int(np.searchsorted(np.asarray(curve.grid), scale, side="right")) - 1
    return float(curve.values[max(idx, 0)])


def meaning_matrix(S: Sequence[Any], meaning_space: Optional[PseudometricSpace] = None) -> np.ndarray:
    meaning_space = meaning_space or EuclideanSpace()
    n = len(S)
    out = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = meaning_space.distance(S[i], S[j])
    return out


def pairwise_grid(space: FiniteMetricSpace, extra: Sequence[float] = ()) -> List[float]:
    """0 plus every realized pairwise distance (and any extra scales), ascending."""
    d = space.matrix()
    values = set(float(v) for v in d[np.triu_indices(space.size, k=1)])
    values.update(float(e) for e in extra)
    values.add(0.0)
    return sorted(v for v in values if v >= 0)


def _check_table(space: FiniteMetricSpace, S: Sequence[Any]) -> None:
    if len(S) != space.size:
        raise ConfigError(f"S has {len(S)} values for a space of {space.size} points")


def minimal_oscillation(
    space: FiniteMetricSpace,
    S: Sequence[Any],
    grid: Optional[Sequence[float]] = None,
    meaning_space: Optional[PseudometricSpace] = None,
) -> ModulusCurve:
    """omega*(eps) = max over pairs with d_R <= eps of d(S(r), S(r')), exhaustively."""
    _check_table(space, S)
    grid = pairwise_grid(space) if grid is None else [float(g) for g in grid]
    if not grid or grid[0] != 0.0:
        raise ConfigError("grid must include 0 as its first point")
    dR = space.matrix()
    dM = meaning_matrix(S, meaning_space)
    values = [float(np.max(np.where(dR <= eps, dM, 0.0))) if space.size else 0.0 for eps in grid]
    return ModulusCurve(grid=grid, values=values)


def is_valid_modulus(
    candidate: ModulusCurve,
    S: Sequence[Any],
    space: FiniteMetricSpace,
    meaning_space: Optional[PseudometricSpace] = None,
) -> ModulusCheck:
    """Monotone, zero at 0, and d(S(r), S(r')) <= candidate(d_R(r, r')) for every pair."""
    _check_table(space, S)
    dR = space.matrix()
    grid_max = candidate.grid[-1]
    if space.size > 1:
        far = float(dR.max())
        if far > grid_max:
            raise GridTooCoarse(far, grid_max)
    if not candidate.is_monotone:
        return ModulusCheck(passed=False, reason="not_monotone")
    if candidate.values[0] != 0.0:
        return ModulusCheck(passed=False, reason="nonzero_at_zero")
    dM = meaning_matrix(S, meaning_space)
    for i in range(space.size):
        for j in range(i + 1, space.size):
            bound = candidate.at(float(dR[i, j]))
            if dM[i, j] > bound:
                return ModulusCheck(passed=False, reason="domination", witness=(i, j), gap=float(dM[i, j] - bound))
    return ModulusCheck(passed=True)


def check_minimality(
    space: FiniteMetricSpace,
    S: Sequence[Any],
    candidate: ModulusCurve,
    meaning_space: Optional[PseudometricSpace] = None,
) -> ModulusCheck:
    """omega* <= candidate pointwise on the candidate's grid."""
    exact = minimal_oscillation(space, S, candidate.grid, meaning_space)
    for idx, (w_star, w) in enumerate(zip(exact.values, candidate.values)):
        if w_star > w:
            return ModulusCheck(passed=False, reason=f"exceeds at grid index {idx}", gap=w_star - w)
    return ModulusCheck(passed=True)


def uniform_discreteness(space: FiniteMetricSpace) -> Optional[float]:
    """Smallest distance between distinct points; None on collapse or fewer than two points."""
    if space.size < 2:
        return None
    d = space.matrix()
    delta0 = float(d[np.triu_indices(space.size, k=1)].min())
    if delta0 <= 0.0:
        return None
    return delta0


def domain_diameter(space: FiniteMetricSpace) -> float:
    return float(space.matrix().max()) if space.size else 0.0


def image_diameter(S: Sequence[Any], meaning_space: Optional[PseudometricSpace] = None) -> float:
    if len(S) < 2:
        return 0.0
    return float(meaning_matrix(S, meaning_space).max())


def lipschitz_candidate(
    space: FiniteMetricSpace,
    S: Sequence[Any],
    grid: Optional[Sequence[float]] = None,
    meaning_space: Optional[PseudometricSpace] = None,
) -> ModulusCurve:
    """The crude line L * eps with L = diam(S(R)) / delta0."""
    grid = pairwise_grid(space) if grid is None else list(grid)
    diam = image_diameter(S, meaning_space)
    delta0 = uniform_discreteness(space)
    if diam == 0.0:
        return ModulusCurve(grid=grid, values=[0.0] * len(grid))
    if delta0 is None:
        return ModulusCurve(grid=grid, values=[0.0] + [math.inf] * (len(grid) - 1))
    L = diam / delta0
    return ModulusCurve(grid=grid, values=[L * g for g in grid])


def local_moduli(
    space: FiniteMetricSpace,
    S: Sequence[Any],
    regions: Mapping[str, Sequence[int]],
    grid: Optional[Sequence[float]] = None,
    meaning_space: Optional[PseudometricSpace] = None,
) -> Dict[str, ModulusCurve]:
    """omega* restricted to each named region of point indices."""
    d = space.matrix()
    out: Dict[str, ModulusCurve] = {}
    for name, idx in regions.items():
        idx = list(idx)
        sub = FiniteMetricSpace(
            points=[space.points[i] for i in idx],
            distances=d[np.ix_(idx, idx)].tolist(),
        )
        out[name] = minimal_oscillation(sub, [S[i] for i in idx], grid or pairwise_grid(space), meaning_space)
    return out


def vanishing_limit_check(
    curve: ModulusCurve,
    check_scales: Sequence[float],
    image_diam: Optional[float] = None,
) -> VanishingCheck:
    """Fails when the curve stays above half the image diameter at every check scale.

    That is the finite signature of a map that is not uniformly continuous:
    shrinking the scale never shrinks the oscillation.
    """
    check_scales = [float(p) for p in check_scales]
    if not check_scales or any(p <= 0 for p in check_scales):
        raise ConfigError("check scales must be strictly positive")
    if any(b >= a for a, b in zip(check_scales, check_scales[1:])):
        raise ConfigError("check scales must descend toward 0")
    finite = [v for v in curve.values if math.isfinite(v)]
    diam = image_diam if image_diam is not None else (max(finite) if finite else 0.0)
    threshold = 0.5 * diam
    scale_values = [(p, curve.at(p)) for p in check_scales]
    stuck = diam > 0 and all(v > threshold for _, v in scale_values)
    if stuck:
        logger.info(f"[Modulus] oscillation stays above {threshold:.4g} at every check scale")
    return VanishingCheck(passed=not stuck, threshold=threshold, scale_values=scale_values)


def reciprocal_counterexample(n: int = 50) -> Tuple[FiniteMetricSpace, List[float]]:
    """{0} with {1/m : m <= n} on the line, S(0)=0 and S(1/m)=1."""
    coords = [[0.0]] + [[1.0 / m] for m in range(1, n + 1)]
    labels = ["0"] + [f"1/{m}" for m in range(1, n + 1)]
    space = FiniteMetricSpace.from_points(coords, labels)
    S = [[0.0]] + [[1.0] for _ in range(n)]
    return space, S
