"""
Grid-world command environment.

Commands are a COLOR atom, a DIRECTION atom, or compose(COLOR, DIRECTION).
Gold meanings compose by vector addition: I(RED NORTH) = I(RED) + I(NORTH).
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from architectures.base import (
    GroundingArchitecture,
    Locus,
    Mechanism,
    Perturbation,
    ProvenanceRecord,
    ThreatModel,
    identity_alignment,
)
from architectures.tabulated import TabulatedArchitecture
from audit.estimators import SuccessPredicate, fixed_sampler
from audit.profile import grounding_profile
from audit.typology import classify
from models.grid_agent import GridAgent
from schemas.evaluation import EvaluationTuple, ThresholdPolicy
from schemas.gridworld import TrainConfig, WorldSpec
from schemas.meanings import VectorMeaning
from schemas.profile import GroundingProfile, TypologyVerdict
from schemas.terms import Atom, Constructor, Term
from semantics.algebra import IntendedInterpretation, TypedGrammar, vector_addition_algebra
from semantics.errors import MalformedCommand, NegativeScale
from semantics.spaces import EuclideanSpace, FiniteMetricSpace
from utils.logger import logger
from utils.rng import StreamFactory

MODIFIER_INTEGRATION = "modifier-integration"
COMPOSE = "compose"

AUDIT_SCALES = (0.0, 0.25, 0.5, 1.0)
AUDIT_SAMPLES = 200
AUDIT_ALPHA = 0.1
AUDIT_TAU = 0.5

# coordinates printed for the agent reported in the literature
PRINTED_OUTPUTS: Dict[str, Tuple[float, float]] = {
    "RED": (7.941, 8.224),
    "NORTH": (-0.097, 1.114),
    "RED NORTH": (7.726, 9.522),
    "RED WEST": (7.050, 8.680),
    "BLUE EAST": (2.609, 1.793),
}


# grammar and gold semantics

def grid_grammar(world: WorldSpec) -> TypedGrammar:
    atoms = [Atom(name=c, sort="COLOR") for c in world.landmarks]
    atoms += [Atom(name=d, sort="DIRECTION") for d in world.directions]
    compose = Constructor(name=COMPOSE, arg_sorts=("COLOR", "DIRECTION"), result_sort="LOCATION")
    return TypedGrammar(atoms, [compose])


def intended_interpretation(world: WorldSpec, grammar: Optional[TypedGrammar] = None) -> IntendedInterpretation:
    """Colours mean their landmark, directions their unit vector."""
    grammar = grammar or grid_grammar(world)
    table = {c: VectorMeaning.of(xy) for c, xy in world.landmarks.items()}
    table.update({d: VectorMeaning.of(v) for d, v in world.directions.items()})
    return IntendedInterpretation(vector_addition_algebra(grammar, 2), table)


def gold_coordinate(world: WorldSpec, tokens: Sequence[str]) -> np.ndarray:
    tokens = tuple(tokens)
    if len(tokens) == 1:
        tok = tokens[0]
        if tok in world.landmarks:
            return np.asarray(world.landmarks[tok], dtype=np.float64)
        if tok in world.directions:
            return np.asarray(world.directions[tok], dtype=np.float64)
    elif len(tokens) == 2 and tokens[0] in world.landmarks and tokens[1] in world.directions:
        return np.asarray(world.landmarks[tokens[0]], dtype=np.float64) + np.asarray(
            world.directions[tokens[1]], dtype=np.float64
        )
    raise MalformedCommand(f"{' '.join(tokens)!r} is not COLOR, DIRECTION or COLOR DIRECTION")


def gold_meaning(world: WorldSpec, command: Term) -> VectorMeaning:
    """Landmark, or landmark + direction for compose(COLOR, DIRECTION). No clamping."""
    if command.is_leaf:
        return VectorMeaning.of(gold_coordinate(world, command.surface()))
    if command.constructor.name != COMPOSE or any(not c.is_leaf for c in command.children):
        raise MalformedCommand(f"unsupported command shape {command.render()}")
    return VectorMeaning.of(gold_coordinate(world, command.surface()))


def command_term(grammar: TypedGrammar, text: str) -> Term:
    tokens = text.split()
    if len(tokens) == 1:
        return grammar.leaf(tokens[0])
    if len(tokens) == 2:
        return grammar.apply(COMPOSE, grammar.leaf(tokens[0]), grammar.leaf(tokens[1]))
    raise MalformedCommand(f"command {text!r} has {len(tokens)} tokens")


def all_composites(world: WorldSpec, grammar: Optional[TypedGrammar] = None) -> List[Term]:
    grammar = grammar or grid_grammar(world)
    return [
        grammar.apply(COMPOSE, grammar.leaf(c), grammar.leaf(d))
        for c in world.landmarks
        for d in world.directions
    ]


def in_distribution_composites(world: WorldSpec, config: TrainConfig, grammar: Optional[TypedGrammar] = None) -> List[Term]:
    heldout = set(config.heldout)
    return [t for t in all_composites(world, grammar) if t.surface_text() not in heldout]


# perturbations

def gaussian_norm_perturbation(
    scale: float,
    seed: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    dim: int = 64,
) -> Perturbation:
    """Add a Gaussian direction rescaled to norm exactly `scale`."""
    if scale < 0:
        raise NegativeScale(scale)
    if rng is None:
        rng = StreamFactory(0 if seed is None else seed).stream("gaussian-norm")
    direction = rng.standard_normal(dim)
    delta = direction * (scale / np.linalg.norm(direction))
    return Perturbation("gaussian_norm", scale, lambda r: np.asarray(r, dtype=np.float64) + delta)


def gaussian_norm_threat(dim: int) -> ThreatModel:
    def draw(rep: np.ndarray, scale: float, rng: np.random.Generator) -> Perturbation:
        return gaussian_norm_perturbation(scale, rng=rng, dim=dim)

    return ThreatModel("gaussian_norm", draw)


# architecture

class GridArchitecture(GroundingArchitecture):
    """Phi = embedding + recurrent encoder, Gamma = linear decoder, A = identity."""

    def __init__(self, agent: GridAgent, world: WorldSpec, train_config: Optional[TrainConfig] = None) -> None:
        self.agent = agent
        self.world = world
        descriptor = train_config.descriptor() if train_config else f"untrained initialization, seed={agent.seed}"
        provenance = ProvenanceRecord(
            g0_level="strong",
            training_process=descriptor,
            acquired_components=[Locus.ENCODE, Locus.CONCEPTUALIZE],
            alignment_external=False,
            notes=[] if train_config is None or not train_config.train_atoms
            else ["single-atom commands were part of the training distribution"],
        )
        super().__init__(
            name="gridworld-agent",
            alphabet=agent.vocab,
            encode=self._encode,
            conceptualize=self._decode,
            align=identity_alignment,
            representation_space=EuclideanSpace(agent.hidden_dim),
            meaning_space=EuclideanSpace(2),
            mechanisms=[Mechanism(
                id=MODIFIER_INTEGRATION,
                locus=Locus.ENCODE,
                description="process tokens after the first",
            )],
            provenance=provenance,
            mode="neural",
        )

    def _encode(self, tokens: Tuple[str, ...], active) -> np.ndarray:
        if MODIFIER_INTEGRATION not in active:
            tokens = tokens[:1]
        return self.agent.hidden_state(tokens)

    def _decode(self, rep: np.ndarray, active) -> VectorMeaning:
        return VectorMeaning.of(self.agent.decode(np.asarray(rep, dtype=np.float64)[None, :])[0])

    def threat_model(self) -> ThreatModel:
        return gaussian_norm_threat(self.agent.hidden_dim)


def build_architecture(agent: GridAgent, world: WorldSpec, train_config: Optional[TrainConfig] = None) -> GridArchitecture:
    return GridArchitecture(agent, world, train_config)


# audits

def _heldout_pairs(world: WorldSpec, grammar: TypedGrammar, commands: Sequence[str]) -> List[Tuple[Term, VectorMeaning]]:
    pairs = []
    for text in commands:
        term = command_term(grammar, text)
        pairs.append((term, gold_meaning(world, term)))
    return pairs


def audit_gridworld(
    arch: GroundingArchitecture,
    world: WorldSpec,
    atoms: Sequence[str],
    items: Sequence[str],
    heldout: Sequence[str],
    seed: int = 0,
    scales: Sequence[float] = AUDIT_SCALES,
    samples_per_scale: int = AUDIT_SAMPLES,
    alpha: float = AUDIT_ALPHA,
    tau: float = AUDIT_TAU,
    threat: Optional[ThreatModel] = None,
    exhaustive: bool = False,
    workers: int = 1,
    policy: Optional[ThresholdPolicy] = None,
    context: str = "default",
    meaning_type: str = "ext",
    aggregator: str = "max",
    success_threshold: Optional[float] = None,
) -> Tuple[GroundingProfile, TypologyVerdict]:
    """Full grid-world audit with one robustness curve per atom.

    An exhaustive sweep over a fixed per-atom representation is exact with a
    single sample, so the sample count drops to 1 in that case.
    """
    grammar = grid_grammar(world)
    interp = intended_interpretation(world, grammar)
    atom_terms = [grammar.leaf(a) for a in atoms]
    threat = threat or arch.threat_model()
    theta = world.success_threshold if success_threshold is None else success_threshold
    eval = EvaluationTuple(
        context=context,
        meaning_type=meaning_type,
        threat_family=threat.family,
        reference="per-atom",
        alpha=alpha,
        threat=threat,
    )
    samplers = {t.surface_text(): fixed_sampler([(t.surface_text(), arch.representation(t))]) for t in atom_terms}
    profile = grounding_profile(
        arch,
        interp,
        eval,
        atoms=[t.atom for t in atom_terms],
        items=[command_term(grammar, text) for text in items],
        heldout=_heldout_pairs(world, grammar, heldout),
        mechanisms=[MODIFIER_INTEGRATION],
        succ=SuccessPredicate(threshold=theta),
        scales=scales,
        samples_per_scale=1 if exhaustive else samples_per_scale,
        tau=tau,
        streams=StreamFactory(seed),
        samplers=samplers,
        aggregator=aggregator,
        exhaustive=exhaustive,
        workers=workers,
    )
    verdict = classify(profile, policy or ThresholdPolicy.for_success_threshold(theta))
    return profile, verdict


def audit_trained_agent(
    agent: GridAgent,
    world: Optional[WorldSpec] = None,
    train_config: Optional[TrainConfig] = None,
    seed: int = 0,
    workers: int = 1,
) -> Tuple[GroundingProfile, TypologyVerdict]:
    """Audit a trained agent: all atoms, in-distribution composites, held-out pair."""
    world = world or WorldSpec()
    train_config = train_config or TrainConfig()
    arch = build_architecture(agent, world, train_config)
    items = [t.surface_text() for t in in_distribution_composites(world, train_config)]
    logger.info(f"[Audit] grid-world agent: {len(world.vocab)} atoms, {len(items)} composites, held out {train_config.heldout}")
    return audit_gridworld(arch, world, world.vocab, items, train_config.heldout, seed=seed, workers=workers)


def printed_architecture(world: Optional[WorldSpec] = None) -> TabulatedArchitecture:
    """Tabulated architecture replaying the printed agent outputs; one point per command."""
    labels = list(PRINTED_OUTPUTS)
    space = FiniteMetricSpace.discrete(len(labels), labels)
    provenance = ProvenanceRecord(
        g0_level="strong",
        training_process="REINFORCE, Gaussian coordinate policy, 3000 episodes (printed outputs)",
        acquired_components=[Locus.ENCODE, Locus.CONCEPTUALIZE],
        notes=["meanings are printed outputs rounded to three decimals"],
    )
    return TabulatedArchitecture(
        "gridworld-printed",
        space,
        [VectorMeaning.of(PRINTED_OUTPUTS[label]) for label in labels],
        {label: i for i, label in enumerate(labels)},
        meaning_space=EuclideanSpace(2),
        first_token_mechanism=MODIFIER_INTEGRATION,
        provenance=provenance,
    )


def audit_printed_coordinates(seed: int = 0) -> Tuple[GroundingProfile, TypologyVerdict]:
    """Audit math over the printed coordinates, bypassing training."""
    world = WorldSpec()
    arch = printed_architecture(world)
    return audit_gridworld(
        arch,
        world,
        atoms=["RED", "NORTH"],
        items=["RED NORTH"],
        heldout=["BLUE EAST", "RED WEST"],
        seed=seed,
        threat=arch.threat_model(),
        exhaustive=True,
    )
