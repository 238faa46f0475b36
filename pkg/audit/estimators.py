"""
Estimators for the grounding-profile quantities.

Every estimator returns the aggregate together with its per-item table so
downstream consumers can recompute intervals.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from architectures.base import GroundingArchitecture
from schemas.evaluation import EvaluationTuple, RepresentationSampler
from schemas.profile import (
    AceEstimate,
    AceRow,
    CompositionEstimate,
    CompositionRow,
    ErrorEstimate,
    ItemRow,
    RobustnessCurve,
    SystematicityEstimate,
    SystematicityRow,
)
from schemas.terms import Atom, Term
from semantics.algebra import IntendedInterpretation, SemanticAlgebra, homomorphic_extension
from semantics.errors import (
    ConfigError,
    EmptyAtomSet,
    EmptyHeldout,
    EmptyInstanceSet,
    EmptySampler,
    LeafTermRejected,
    NegativeScale,
)
from utils.logger import logger
from utils.rng import StreamFactory


class Aggregator(BaseModel):
    """max | mean | quantile:<q>"""
    kind: str = Field("max", pattern="^(max|mean|quantile)$")
    q: float = Field(0.9, ge=0.0, le=1.0)

    @classmethod
    def parse(cls, spec: "str | Aggregator") -> "Aggregator":
        if isinstance(spec, Aggregator):
            return spec
        if spec.startswith("quantile"):
            _, _, q = spec.partition(":")
            return cls(kind="quantile", q=float(q) if q else 0.9)
        return cls(kind=spec)

    def __str__(self) -> str:
        return f"quantile:{self.q:g}" if self.kind == "quantile" else self.kind

    def __call__(self, values: Sequence[float]) -> float:
        arr = np.asarray(values, dtype=np.float64)
        if self.kind == "max":
            return float(arr.max())
        if self.kind == "mean":
            return float(arr.mean())
        return float(np.quantile(arr, self.q, method="higher"))


class SuccessPredicate(BaseModel):
    """succ(outcome) = 1 iff d(realized, target) <= threshold"""
    threshold: float = Field(..., ge=0.0)

    def __call__(self, realized: Any, target: Any, space) -> int:
        return int(space.distance(realized, target) <= self.threshold)


def fixed_sampler(reps: Sequence[Tuple[str, Any]]) -> RepresentationSampler:
    """Deterministic sampler cycling through an explicit representation list."""
    reps = list(reps)

    def sample(rng: np.random.Generator, n: int) -> List[Tuple[str, Any]]:
        if not reps:
            return []
        return [reps[i % len(reps)] for i in range(n)]

    return sample


def term_sampler(arch: GroundingArchitecture, terms: Sequence[Term]) -> RepresentationSampler:
    """Uniform draws of Phi(surf(term)) over a finite term list."""
    reps = [(t.surface_text(), arch.representation(t)) for t in terms]

    def sample(rng: np.random.Generator, n: int) -> List[Tuple[str, Any]]:
        if not reps:
            return []
        idx = rng.integers(len(reps), size=n)
        return [reps[int(i)] for i in idx]

    return sample


def preservation_error(
    arch: GroundingArchitecture,
    interp: IntendedInterpretation,
    k: str,
    t: str,
    atoms: Sequence[Atom],
    aggregator: "str | Aggregator" = "max",
) -> ErrorEstimate:
    if not atoms:
        raise EmptyAtomSet("preservation error needs at least one atom")
    agg = Aggregator.parse(aggregator)
    rows: List[ItemRow] = []
    for atom in atoms:
        target = interp(atom)
        realized = arch.interpret(Term.leaf(atom), k, t)
        rows.append(ItemRow(
            item=atom.name,
            realized=realized,
            target=target,
            distance=arch.meaning_space.distance(realized, target),
        ))
    value = agg([r.distance for r in rows])
    logger.info(f"[Audit] eps_pres={value:.4f} ({agg}, {len(rows)} atoms)")
    return ErrorEstimate(value=value, aggregator=str(agg), rows=rows)


def faithfulness_error(
    arch: GroundingArchitecture,
    interp: IntendedInterpretation,
    k: str,
    t: str,
    items: Sequence[Term],
    aggregator: "str | Aggregator" = "max",
) -> ErrorEstimate:
    if not items:
        raise EmptyInstanceSet("faithfulness error needs at least one item")
    agg = Aggregator.parse(aggregator)
    rows: List[ItemRow] = []
    for item in items:
        target = homomorphic_extension(interp, item)
        realized = arch.interpret(item, k, t)
        rows.append(ItemRow(
            item=item.surface_text(),
            realized=realized,
            target=target,
            distance=arch.meaning_space.distance(realized, target),
        ))
    value = agg([r.distance for r in rows])
    logger.info(f"[Audit] eps_faith={value:.4f} ({agg}, {len(rows)} items)")
    return ErrorEstimate(value=value, aggregator=str(agg), rows=rows)


def estimate_ace(
    arch: GroundingArchitecture,
    mechanisms: Iterable[str],
    eval: EvaluationTuple,
    instances: Sequence[Tuple[Term, Any]],
    succ: SuccessPredicate,
) -> AceEstimate:
    """Paired on/off runs over the same instance list."""
    off = arch.check_mechanisms(mechanisms)
    if not instances:
        raise EmptyInstanceSet("ACE needs at least one instance")
    k, t = eval.context, eval.meaning_type
    space = arch.meaning_space
    rows: List[AceRow] = []
    for term, gold in instances:
        on = arch.interpret(term, k, t)
        ablated = arch.interpret_under(term, k, t, off)
        rows.append(AceRow(
            item=term.surface_text(),
            on_meaning=on,
            off_meaning=ablated,
            gold=gold,
            on_distance=space.distance(on, gold),
            off_distance=space.distance(ablated, gold),
            success_on=succ(on, gold, space),
            success_off=succ(ablated, gold, space),
        ))
    ace = float(np.mean([r.success_on - r.success_off for r in rows]))
    ace_continuous = float(np.mean([r.off_distance - r.on_distance for r in rows]))
    logger.info(f"[Audit] ace={ace:.4f} ace_continuous={ace_continuous:.4f} off={sorted(off)}")
    return AceEstimate(
        mechanisms=sorted(off),
        ace=ace,
        ace_continuous=ace_continuous,
        success_threshold=succ.threshold,
        rows=rows,
    )


def _check_scales(scales: Sequence[float]) -> List[float]:
    scales = [float(s) for s in scales]
    if not scales:
        raise ConfigError("robustness curve needs at least one scale")
    for s in scales:
        if s < 0:
            raise NegativeScale(s)
    if scales[0] != 0.0:
        raise ConfigError("scale grid must start at 0")
    if any(b <= a for a, b in zip(scales, scales[1:])):
        raise ConfigError("scale grid must be strictly ascending")
    return scales


def robustness_curve(
    arch: GroundingArchitecture,
    eval: EvaluationTuple,
    scales: Sequence[float],
    samples_per_scale: int,
    streams: StreamFactory,
    alpha: Optional[float] = None,
    rep_sampler: Optional[RepresentationSampler] = None,
    label: str = "pooled",
    exhaustive: bool = False,
    workers: int = 1,
) -> RobustnessCurve:
    """(1-alpha) quantile of semantic drift per scale, then a running max.

    With `exhaustive` every admissible perturbation of each drawn
    representation is applied and the sup is exact; otherwise one draw per
    representation stands in for it.
    """
    scales = _check_scales(scales)
    alpha = eval.alpha if alpha is None else alpha
    if not 0.0 <= alpha < 1.0:
        raise ConfigError(f"alpha must lie in [0, 1), got {alpha}")
    if samples_per_scale < 1:
        raise ConfigError("samples_per_scale must be >= 1")
    sampler = rep_sampler or eval.sampler
    threat = eval.threat
    if sampler is None or threat is None:
        raise ConfigError("evaluation tuple carries no sampler or threat model")
    k, t = eval.context, eval.meaning_type
    space = arch.meaning_space

    def drifts_at(index: int) -> List[float]:
        eps = scales[index]
        reps = sampler(streams.stream("reference", label, index), samples_per_scale)
        if not reps:
            raise EmptySampler(f"reference sampler for {label!r} returned nothing")
        rng = streams.stream("threat", label, index)
        out: List[float] = []
        for _, rep in reps:
            base = arch.semantics(rep, k, t)
            perturbations = threat.enumerate(rep, eps) if exhaustive else [threat.draw(rep, eps, rng)]
            out.append(max(space.distance(base, arch.semantics(u(rep), k, t)) for u in perturbations))
        return out

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="robustness-worker") as pool:
            drifts = list(pool.map(drifts_at, range(len(scales))))
    else:
        drifts = [drifts_at(i) for i in range(len(scales))]

    raw = [float(np.quantile(np.asarray(d), 1.0 - alpha, method="higher")) for d in drifts]
    raw[0] = 0.0
    values = np.maximum.accumulate(np.asarray(raw)).tolist()
    logger.info(
        f"[Audit] omega[{label}] "
        + ", ".join(f"{s:g}:{v:.4f}" for s, v in zip(scales, values))
    )
    return RobustnessCurve(
        label=label,
        scales=scales,
        values=values,
        raw_values=raw,
        alpha=alpha,
        samples_per_scale=samples_per_scale,
        exhaustive=exhaustive,
        drifts=drifts,
    )


def pooled_curve(curves: Sequence[RobustnessCurve]) -> RobustnessCurve:
    """Pointwise max of curves sharing a scale grid."""
    if not curves:
        raise EmptySampler("no per-sample curves to pool")
    scales = curves[0].scales
    for c in curves[1:]:
        if c.scales != scales:
            raise ConfigError("cannot pool curves on different scale grids")
    values = np.max([c.values for c in curves], axis=0).tolist()
    raw = np.max([c.raw_values for c in curves], axis=0).tolist()
    return RobustnessCurve(
        label="pooled",
        scales=scales,
        values=values,
        raw_values=raw,
        alpha=curves[0].alpha,
        samples_per_scale=curves[0].samples_per_scale,
        exhaustive=all(c.exhaustive for c in curves),
    )


def composition_deficit(
    arch: GroundingArchitecture,
    algebra: SemanticAlgebra,
    k: str,
    t: str,
    node_terms: Sequence[Term],
    aggregator: "str | Aggregator" = "max",
) -> CompositionEstimate:
    """Agent's composite meaning against f^M over the agent's own part meanings."""
    if not node_terms:
        raise EmptyInstanceSet("composition deficit needs at least one composite")
    agg = Aggregator.parse(aggregator)
    rows: List[CompositionRow] = []
    for term in node_terms:
        if term.is_leaf:
            raise LeafTermRejected(term.render())
        actual = arch.interpret(term, k, t)
        combined = algebra.apply(term.constructor, [arch.interpret(c, k, t) for c in term.children])
        rows.append(CompositionRow(
            item=term.surface_text(),
            actual=actual,
            combined=combined,
            distance=algebra.distance(actual, combined),
        ))
    value = agg([r.distance for r in rows])
    logger.info(f"[Audit] delta_comp={value:.4f} ({agg}, {len(rows)} composites)")
    return CompositionEstimate(value=value, aggregator=str(agg), rows=rows)


def systematicity(
    arch: GroundingArchitecture,
    k: str,
    t: str,
    heldout: Sequence[Tuple[Term, Any]],
    tau: float,
) -> SystematicityEstimate:
    if not heldout:
        raise EmptyHeldout("systematicity needs at least one held-out item")
    if tau < 0:
        raise NegativeScale(tau)
    rows: List[SystematicityRow] = []
    for term, gold in heldout:
        realized = arch.interpret(term, k, t)
        d = arch.meaning_space.distance(realized, gold)
        rows.append(SystematicityRow(
            item=term.surface_text(),
            realized=realized,
            gold=gold,
            distance=d,
            within_tolerance=d <= tau,
        ))
    beta = sum(r.within_tolerance for r in rows) / len(rows)
    logger.info(f"[Audit] beta={beta:.4f} (tau={tau:g}, {len(rows)} held-out)")
    return SystematicityEstimate(beta=beta, tau=tau, rows=rows)
