"""Assembles the grounding profile from the component estimators."""

from __future__ import annotations

from typing import Any, Dict, Iterable, Mapping, Optional, Sequence, Tuple

from architectures.base import GroundingArchitecture
from schemas.evaluation import EvaluationTuple, RepresentationSampler
from schemas.profile import GroundingProfile, ProfileTables, RobustnessCurve
from schemas.terms import Atom, Term
from semantics.algebra import IntendedInterpretation, SemanticAlgebra, homomorphic_extension
from utils.logger import logger
from utils.rng import StreamFactory

from .estimators import (
    Aggregator,
    SuccessPredicate,
    composition_deficit,
    estimate_ace,
    faithfulness_error,
    pooled_curve,
    preservation_error,
    robustness_curve,
    systematicity,
)


def grounding_profile(
    arch: GroundingArchitecture,
    interp: IntendedInterpretation,
    eval: EvaluationTuple,
    atoms: Sequence[Atom],
    items: Sequence[Term],
    heldout: Sequence[Tuple[Term, Any]],
    mechanisms: Iterable[str],
    succ: SuccessPredicate,
    scales: Sequence[float],
    samples_per_scale: int,
    tau: float,
    streams: StreamFactory,
    algebra: Optional[SemanticAlgebra] = None,
    samplers: Optional[Mapping[str, RepresentationSampler]] = None,
    ace_instances: Optional[Sequence[Tuple[Term, Any]]] = None,
    composites: Optional[Sequence[Term]] = None,
    aggregator: "str | Aggregator" = "max",
    exhaustive: bool = False,
    workers: int = 1,
) -> GroundingProfile:
    """GP(arch; eval). Pure aggregation over the component estimators.

    `samplers` maps a reference-sample label to its sampler; one curve is
    estimated per label and the reported curve is their pointwise max. Without
    it the evaluation tuple's own sampler is used. ACE instances default to
    `items` with gold meanings from the homomorphic extension; composites for
    the deficit default to the non-leaf items.
    """
    k, t = eval.context, eval.meaning_type
    algebra = algebra or interp.algebra
    mechanisms = sorted(arch.check_mechanisms(mechanisms))

    pres = preservation_error(arch, interp, k, t, atoms, aggregator)
    faith = faithfulness_error(arch, interp, k, t, items, aggregator)

    if ace_instances is None:
        ace_instances = [(item, homomorphic_extension(interp, item)) for item in items]
    ace = estimate_ace(arch, mechanisms, eval, ace_instances, succ)

    if samplers is None:
        samplers = {"pooled": eval.sampler}
    curves: Dict[str, RobustnessCurve] = {}
    for label, sampler in samplers.items():
        curves[label] = robustness_curve(
            arch, eval, scales, samples_per_scale, streams.child("robustness"),
            rep_sampler=sampler, label=label, exhaustive=exhaustive, workers=workers,
        )
    pooled = pooled_curve(list(curves.values())) if len(curves) > 1 else next(iter(curves.values()))

    if composites is None:
        composites = [item for item in items if not item.is_leaf]
    comp = composition_deficit(arch, algebra, k, t, composites, aggregator)
    syst = systematicity(arch, k, t, heldout, tau)

    notes = []
    if not exhaustive:
        notes.append("sup over perturbations approximated by one sampled draw per representation")
    if len(curves) > 1:
        notes.append(f"robustness curve is the pointwise max over {len(curves)} per-sample curves")
    notes.extend(arch.provenance.notes)

    profile = GroundingProfile(
        eps_pres=pres.value,
        eps_faith=faith.value,
        ace=ace.ace,
        ace_continuous=ace.ace_continuous,
        omega_curve=pooled.points(),
        delta_comp=comp.value,
        beta=syst.beta,
        g0_level=arch.g0_level(),
        eval=eval.summary(),
        mechanisms=mechanisms,
        success_threshold=succ.threshold,
        tau=tau,
        tables=ProfileTables(
            preservation=pres.rows,
            faithfulness=faith.rows,
            ace=ace.rows,
            composition=comp.rows,
            systematicity=syst.rows,
        ),
        curves=curves,
        notes=notes,
    )
    logger.info(
        f"[Audit] profile for {arch.name}: eps_pres={profile.eps_pres:.4f} eps_faith={profile.eps_faith:.4f} "
        f"ace={profile.ace:.3f} delta_comp={profile.delta_comp:.4f} beta={profile.beta:.2f} g0={profile.g0_level}"
    )
    return profile
