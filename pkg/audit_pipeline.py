"""
Audit pipeline: orchestration behind the four CLI verbs.

train:    TrainRunConfig -> REINFORCE -> weights.json + train_log.csv
audit:    AuditConfig -> architecture -> grounding profile + verdict -> report / CSV tables
verify:   property suites (modulus, homomorphism, counterexample, gradients)
classify: saved report(s) -> typology verdict
"""

from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field

from architectures.symbolic import (
    DEFAULT_HELDOUT,
    STIPULATED_LOOKUP,
    build_symbolic_architecture,
    default_rule_base,
    in_grammar_composites,
    load_rule_base,
    parse_command,
)
from audit.estimators import SuccessPredicate, fixed_sampler
from audit.modulus import (
    ModulusCurve,
    check_minimality,
    image_diameter,
    is_valid_modulus,
    lipschitz_candidate,
    minimal_oscillation,
    pairwise_grid,
    reciprocal_counterexample,
    vanishing_limit_check,
)
from audit.profile import grounding_profile
from audit.typology import classify
from config.settings import settings
from connectors.report_output import (
    REPORT_FILE,
    TRAIN_LOG_FILE,
    WEIGHTS_FILE,
    read_json,
    read_report,
    read_weights,
    write_report,
    write_tables,
    write_train_log,
    write_weights,
)
from environments.gridworld import (
    audit_gridworld,
    build_architecture,
    in_distribution_composites,
    printed_architecture,
)
from models.grid_agent import GridAgent
from models.reinforce import gradient_check, train
from schemas.config import AuditConfig, ProfileReport, TrainRunConfig
from schemas.evaluation import EvaluationTuple, ThresholdPolicy
from schemas.gridworld import AgentSpec, TrainLog, WorldSpec
from schemas.profile import GroundingProfile, TypologyVerdict
from semantics.algebra import check_homomorphism, homomorphic_extension
from semantics.errors import ConfigError
from semantics.spaces import FiniteMetricSpace
from utils.logger import logger
from utils.rng import StreamFactory

PathLike = Union[str, Path]

SUITES = ("modulus", "homomorphism", "counterexample", "gradients")
GRADIENT_TOLERANCE = 1e-4
# mean final distance below which a training run counts as converged
CONVERGED_LOSS = 0.05


class VerifyResult(BaseModel):
    suite: str
    passed: bool
    trials: int = 0
    summary: str
    details: Dict[str, Any] = Field(default_factory=dict)


def _resolve(path: Optional[str], base: Path) -> Optional[str]:
    if path is None:
        return None
    p = Path(path)
    if not p.is_absolute() and not p.exists() and (base / p).exists():
        p = base / p
    if not p.exists():
        raise ConfigError(f"referenced file not found: {path}")
    return str(p)


def load_audit_config(path: PathLike) -> AuditConfig:
    """Read an audit document; relative file references resolve against its directory."""
    path = Path(path)
    config = read_json(AuditConfig, path)
    base = path.parent
    return config.model_copy(update={
        "weights": _resolve(config.weights, base),
        "rules": _resolve(config.rules, base),
    })


def load_train_config(path: PathLike) -> TrainRunConfig:
    return read_json(TrainRunConfig, path)


def converged(log: TrainLog) -> bool:
    """An empty log (zero episodes) has nothing to judge and counts as converged."""
    return not log.rows or log.final_loss < CONVERGED_LOSS


class AuditPipeline:
    """Runs train / audit / verify / classify; stateless between calls."""

    def __init__(self, output_dir: Optional[str] = None, workers: Optional[int] = None) -> None:
        self.output_dir = Path(output_dir or settings.output_dir)
        self.workers = workers or settings.estimator_workers

    # train

    def train(self, config: TrainRunConfig, out_dir: Optional[PathLike] = None) -> Tuple[GridAgent, TrainLog]:
        out = Path(out_dir or config.output_dir or self.output_dir)
        agent, log = train(config.world, config.agent, config.train)
        descriptor = {"descriptor": config.train.descriptor(), "config": config.train.model_dump(mode="json")}
        write_weights(agent.to_weight_file(training=descriptor), out / WEIGHTS_FILE)
        write_train_log(log, out / TRAIN_LOG_FILE)
        if not converged(log):
            logger.warning(f"[Pipeline] final training loss {log.final_loss:.4f} is above {CONVERGED_LOSS}")
        logger.info(f"[Pipeline] training artefacts written to {out}")
        return agent, log

    # audit

    def audit(self, config: AuditConfig) -> ProfileReport:
        policy_override = config.thresholds
        if config.architecture == "symbolic":
            profile, verdict = self._audit_symbolic(config, policy_override)
        else:
            profile, verdict = self._audit_gridworld(config, policy_override)
        report = ProfileReport(
            toolkit_version=settings.toolkit_version,
            generated_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            seed=config.seed,
            profile=profile,
            verdict=verdict,
            config=config,
            extensions=dict(profile.extensions),
        )
        return report

    def write_audit(self, report: ProfileReport, out_dir: Optional[PathLike] = None) -> List[Path]:
        out = Path(out_dir or report.config.output_dir or self.output_dir)
        written = [write_report(report, out / REPORT_FILE)]
        if report.config.format == "csv-tables":
            written.extend(write_tables(report.profile, out))
        return written

    def _audit_gridworld(
        self, config: AuditConfig, policy: Optional[ThresholdPolicy]
    ) -> Tuple[GroundingProfile, TypologyVerdict]:
        world = config.world
        if config.architecture == "gridworld-printed":
            arch = printed_architecture(world)
            atoms = config.atoms or ["RED", "NORTH"]
            items = config.items or ["RED NORTH"]
            exhaustive = True if config.exhaustive is None else config.exhaustive
        else:
            wf = read_weights(config.weights)
            agent = GridAgent.from_weight_file(wf)
            arch = build_architecture(agent, world, config.train)
            atoms = config.atoms or world.vocab
            items = config.items or [t.surface_text() for t in in_distribution_composites(world, config.train)]
            exhaustive = bool(config.exhaustive)
        threat = arch.threat_model()
        if config.threat not in (None, threat.family):
            raise ConfigError(f"{arch.name} supports the {threat.family!r} threat, not {config.threat!r}")
        if exhaustive and not threat.enumerable:
            raise ConfigError(f"threat {threat.family!r} cannot be swept exhaustively")
        heldout = [h.command for h in config.heldout] if config.heldout else list(config.train.heldout)
        if config.heldout and any(h.gold is not None for h in config.heldout):
            logger.warning("[Pipeline] grid-world held-out gold is recomputed from the world spec")
        return audit_gridworld(
            arch,
            world,
            atoms,
            items,
            heldout,
            seed=config.seed,
            scales=config.scales,
            samples_per_scale=config.samples_per_scale,
            alpha=config.alpha,
            tau=config.tau,
            threat=threat,
            exhaustive=exhaustive,
            workers=config.workers if config.workers > 1 else self.workers,
            policy=policy,
            context=config.context,
            meaning_type=config.meaning_type,
            aggregator=config.aggregator,
            success_threshold=config.success_threshold,
        )

    def _audit_symbolic(
        self, config: AuditConfig, policy: Optional[ThresholdPolicy]
    ) -> Tuple[GroundingProfile, TypologyVerdict]:
        kb = load_rule_base(config.rules) if config.rules else default_rule_base()
        arch, interp = build_symbolic_architecture(kb)
        grammar = arch.grammar
        atoms = [grammar.atom(a) for a in config.atoms] if config.atoms else list(grammar.atoms.values())
        if config.items:
            items = [parse_command(kb, grammar, text) for text in config.items]
        else:
            items = in_grammar_composites(grammar)
        if config.heldout:
            heldout = []
            for entry in config.heldout:
                if entry.gold is None:
                    raise ConfigError(f"symbolic held-out item {entry.command!r} needs a gold meaning")
                heldout.append((parse_command(kb, grammar, entry.command), entry.gold))
        else:
            heldout = [(parse_command(kb, grammar, text), gold) for text, gold in DEFAULT_HELDOUT.items()]

        threat = arch.threat_model()
        if config.threat not in (None, threat.family):
            raise ConfigError(f"symbolic-ref supports the {threat.family!r} threat, not {config.threat!r}")
        exhaustive = True if config.exhaustive is None else config.exhaustive
        theta = 0.5 if config.success_threshold is None else config.success_threshold
        eval = EvaluationTuple(
            context=config.context,
            meaning_type=config.meaning_type,
            threat_family=threat.family,
            reference="per-atom",
            alpha=config.alpha,
            threat=threat,
        )
        samplers = {a.name: fixed_sampler([(a.name, (a.name,))]) for a in atoms}
        profile = grounding_profile(
            arch,
            interp,
            eval,
            atoms=atoms,
            items=items,
            heldout=heldout,
            mechanisms=config.mechanisms or [STIPULATED_LOOKUP],
            succ=SuccessPredicate(threshold=theta),
            scales=config.scales,
            samples_per_scale=1 if exhaustive else config.samples_per_scale,
            tau=config.tau,
            streams=StreamFactory(config.seed),
            samplers=samplers,
            aggregator=config.aggregator,
            exhaustive=exhaustive,
            workers=config.workers if config.workers > 1 else self.workers,
        )
        if profile.g0_level == "weak":
            profile.notes.append("stipulated mappings: the acquisition clause of G2b fails whatever the ACE value")
        verdict = classify(profile, policy or ThresholdPolicy.for_success_threshold(theta))
        return profile, verdict

    # classify

    def classify(self, report_path: PathLike, ling_report_path: Optional[PathLike] = None) -> TypologyVerdict:
        report = read_report(report_path)
        ling = read_report(ling_report_path).profile if ling_report_path else None
        policy = report.config.thresholds or ThresholdPolicy.for_success_threshold(
            report.profile.success_threshold or 0.5
        )
        return classify(report.profile, policy, ling)

    # verify

    def verify(self, suite: str, seed: Optional[int] = None, trials: Optional[int] = None) -> VerifyResult:
        if suite not in SUITES:
            raise ConfigError(f"unknown verify suite {suite!r} (choose from {', '.join(SUITES)})")
        seed = settings.default_seed if seed is None else seed
        trials = settings.verify_trials if trials is None else trials
        streams = StreamFactory(seed).child("verify", suite)
        result = getattr(self, f"_verify_{suite}")(streams, trials)
        level = logger.info if result.passed else logger.error
        level(f"[Verify] {suite}: {'ok' if result.passed else 'FAILED'} - {result.summary}")
        return result

    def _verify_modulus(self, streams: StreamFactory, trials: int) -> VerifyResult:
        violations: List[str] = []
        for trial in range(trials):
            rng = streams.stream("space", trial)
            space, S = random_finite_space(rng)
            exact = minimal_oscillation(space, S)
            if not exact.is_monotone or exact.values[0] != 0.0:
                violations.append(f"trial {trial}: omega* not monotone or nonzero at 0")
                continue
            if not is_valid_modulus(exact, S, space).passed:
                violations.append(f"trial {trial}: omega* misses a realized oscillation")
            candidate = random_valid_modulus(exact, rng)
            if not is_valid_modulus(candidate, S, space).passed:
                violations.append(f"trial {trial}: generated candidate is not a modulus")
            if not check_minimality(space, S, candidate).passed:
                violations.append(f"trial {trial}: omega* exceeds a valid modulus")

        discrete_failures = check_discrete_step_moduli(streams, max(1, trials // 10))
        violations.extend(discrete_failures)
        return VerifyResult(
            suite="modulus",
            passed=not violations,
            trials=trials,
            summary=f"{trials} random spaces, {len(violations)} violations",
            details={"violations": violations[:20]},
        )

    def _verify_homomorphism(self, streams: StreamFactory, trials: int) -> VerifyResult:
        arch, interp = build_symbolic_architecture()
        grammar = arch.grammar
        rng = streams.stream("terms")
        terms = grammar.enumerate_terms(2) + [grammar.random_term(rng, 4) for _ in range(trials)]

        def F(term):
            return arch.interpret(term, "default", "ext")

        pres = max(arch.meaning_space.distance(F(grammar.leaf(a.name)), interp(a)) for a in grammar.atoms.values())
        deficit = check_homomorphism(F, arch.algebra, terms)
        mismatches = [t.render() for t in terms if F(t) != homomorphic_extension(interp, t)]
        passed = pres == 0.0 and deficit == 0.0 and not mismatches
        return VerifyResult(
            suite="homomorphism",
            passed=passed,
            trials=len(terms),
            summary=f"eps_pres={pres:g} delta_comp={deficit:g} over {len(terms)} terms, {len(mismatches)} mismatches",
            details={"mismatches": mismatches[:20]},
        )

    def _verify_counterexample(self, streams: StreamFactory, trials: int) -> VerifyResult:
        n = 50
        space, S = reciprocal_counterexample(n)
        curve = minimal_oscillation(space, S)
        check_scales = [1.0 / m for m in range(1, n + 1)]
        check = vanishing_limit_check(curve, check_scales, image_diameter(S))
        detected = not check.passed
        return VerifyResult(
            suite="counterexample",
            passed=detected,
            trials=1,
            summary=(
                f"oscillation stays at {min(v for _, v in check.scale_values):g} down to scale 1/{n}: "
                + ("not uniformly continuous (detected)" if detected else "no failure detected")
            ),
            details={"scale_values": check.scale_values[-5:]},
        )

    def _verify_gradients(self, streams: StreamFactory, trials: int) -> VerifyResult:
        world = WorldSpec()
        agent = GridAgent.initialize(world.vocab, AgentSpec(seed=streams.seed % (1 << 31)))
        reports = gradient_check(agent, world, seed=streams.seed)
        worst = max(r.max_relative_error for r in reports)
        return VerifyResult(
            suite="gradients",
            passed=worst <= GRADIENT_TOLERANCE,
            trials=len(reports),
            summary=f"max relative error {worst:.3e} (tolerance {GRADIENT_TOLERANCE:g})",
            details={r.loss: {g.group: g.relative_error for g in r.groups} for r in reports},
        )


# random instances for the modulus suite

def random_finite_space(rng: np.random.Generator, max_points: int = 12) -> Tuple[FiniteMetricSpace, List[List[float]]]:
    """Small planar space (integer grid, so distance ties occur) with random vector meanings."""
    n = int(rng.integers(1, max_points + 1))
    cells = rng.choice(25, size=n, replace=False)
    coords = np.stack([cells // 5, cells % 5], axis=1).astype(np.float64)
    if rng.random() < 0.5:
        coords = coords + 0.5 * rng.random((n, 2))
    space = FiniteMetricSpace.from_points(coords.tolist())
    S = rng.normal(size=(n, 2)).round(3).tolist()
    return space, S


def random_valid_modulus(exact: ModulusCurve, rng: np.random.Generator) -> ModulusCurve:
    """omega* plus a random nondecreasing slack that is 0 at scale 0."""
    slack = np.cumsum(rng.exponential(0.5, size=len(exact.grid)))
    slack = slack - slack[0]
    return ModulusCurve(grid=list(exact.grid), values=[v + s for v, s in zip(exact.values, slack.tolist())])


def check_discrete_step_moduli(streams: StreamFactory, trials: int) -> List[str]:
    """On discrete spaces omega* is 0 below 1 and the image diameter from 1 on."""
    failures = []
    grid = [0.0, 0.5, 0.999, 1.0, 2.0]
    for trial in range(trials):
        rng = streams.stream("discrete", trial)
        n = int(rng.integers(2, 13))
        space = FiniteMetricSpace.discrete(n)
        S = rng.normal(size=(n, 2)).tolist()
        curve = minimal_oscillation(space, S, grid)
        diam = image_diameter(S)
        expected = [0.0, 0.0, 0.0, diam, diam]
        if curve.values != expected:
            failures.append(f"discrete trial {trial}: got {curve.values}, expected {expected}")
        if not is_valid_modulus(lipschitz_candidate(space, S, pairwise_grid(space, grid)), S, space).passed:
            failures.append(f"discrete trial {trial}: Lipschitz candidate rejected")
    return failures


_audit_pipeline: Optional[AuditPipeline] = None


def get_audit_pipeline() -> AuditPipeline:
    global _audit_pipeline
    if _audit_pipeline is None:
        _audit_pipeline = AuditPipeline()
    return _audit_pipeline
