import numpy as np
import pytest

from environments.gridworld import (
    MODIFIER_INTEGRATION,
    all_composites,
    audit_trained_agent,
    audit_gridworld,
    audit_printed_coordinates,
    build_architecture,
    command_term,
    gaussian_norm_perturbation,
    gold_coordinate,
    gold_meaning,
    grid_grammar,
    in_distribution_composites,
)
from models.reinforce import train, training_commands
from schemas.gridworld import AgentSpec, TrainConfig, WorldSpec
from schemas.meanings import VectorMeaning
from schemas.terms import Atom, Term
from semantics.errors import MalformedCommand, NegativeScale, UnknownMechanism, UnknownToken
from utils.rng import StreamFactory


@pytest.mark.parametrize(
    "command, expected",
    [
        ("RED", (8.0, 8.0)),
        ("BLUE", (2.0, 2.0)),
        ("NORTH", (0.0, 1.0)),
        ("RED NORTH", (8.0, 9.0)),
        ("BLUE EAST", (3.0, 2.0)),
        ("RED WEST", (7.0, 8.0)),
    ],
)
def test_gold_meanings(world, grammar, command, expected) -> None:
    assert gold_meaning(world, command_term(grammar, command)) == VectorMeaning.of(expected)


def test_gold_is_not_clamped_to_the_world() -> None:
    world = WorldSpec(landmarks={"RED": (10.0, 10.0), "BLUE": (2.0, 2.0)})
    assert tuple(gold_coordinate(world, ("RED", "NORTH"))) == (10.0, 11.0)


@pytest.mark.parametrize("tokens", [("NORTH", "RED"), ("RED", "BLUE"), ("RED", "NORTH", "EAST"), ("GREEN",)])
def test_malformed_commands(world, tokens) -> None:
    with pytest.raises(MalformedCommand):
        gold_coordinate(world, tokens)


def test_world_validation() -> None:
    with pytest.raises(ValueError):
        WorldSpec(landmarks={"RED": (11.0, 0.0)})
    with pytest.raises(ValueError):
        WorldSpec(directions={"NORTH": (0.0, 2.0)})


def test_composite_splits(world) -> None:
    assert len(all_composites(world)) == 8
    in_dist = [t.surface_text() for t in in_distribution_composites(world, TrainConfig())]
    assert len(in_dist) == 6
    assert "BLUE EAST" not in in_dist and "RED WEST" not in in_dist


def test_gaussian_norm_perturbation_has_exact_norm() -> None:
    rep = np.zeros(64)
    for scale in (0.25, 0.5, 1.0):
        u = gaussian_norm_perturbation(scale, seed=0)
        assert np.linalg.norm(u(rep) - rep) == pytest.approx(scale, rel=1e-12)
    a = gaussian_norm_perturbation(0.5, seed=0)(rep)
    b = gaussian_norm_perturbation(0.5, seed=1)(rep)
    assert not np.allclose(a, b)
    assert np.array_equal(gaussian_norm_perturbation(0.0, seed=0)(rep), rep)
    with pytest.raises(NegativeScale):
        gaussian_norm_perturbation(-0.1)


def test_threat_draws_are_stream_determined(agent, world) -> None:
    arch = build_architecture(agent, world)
    threat = arch.threat_model()
    rep = arch.representation(command_term(grid_grammar(world), "RED"))
    a = threat.draw(rep, 0.5, StreamFactory(2).stream("x"))(rep)
    b = threat.draw(rep, 0.5, StreamFactory(2).stream("x"))(rep)
    assert np.array_equal(a, b)
    assert not threat.enumerable


def test_architecture_mechanisms(agent, world, grammar) -> None:
    arch = build_architecture(agent, world)
    term = command_term(grammar, "RED NORTH")
    ablated = arch.interpret_under(term, "default", "ext", [MODIFIER_INTEGRATION])
    assert ablated == arch.interpret(grammar.leaf("RED"), "default", "ext")
    assert arch.interpret(term, "default", "ext") != ablated
    with pytest.raises(UnknownMechanism):
        arch.interpret_under(term, "default", "ext", ["attention"])
    assert arch.g0_level() == "strong"
    assert list(arch.mechanisms) == [MODIFIER_INTEGRATION]


def test_external_alignment_caps_g0_at_weak(agent, world) -> None:
    arch = build_architecture(agent, world)
    assert arch.g0_level() == "strong"
    arch.provenance = arch.provenance.model_copy(update={"alignment_external": True})
    assert arch.g0_level() == "weak"


def test_architecture_rejects_unknown_tokens(agent, world, grammar) -> None:
    arch = build_architecture(agent, world)
    with pytest.raises(UnknownToken):
        arch.interpret(Term.leaf(Atom(name="GREEN", sort="COLOR")), "default", "ext")


def test_interpret_is_decoder_of_encoder(agent, world, grammar) -> None:
    arch = build_architecture(agent, world)
    term = command_term(grammar, "BLUE SOUTH")
    expected = agent.forward(("BLUE", "SOUTH"))[1]
    assert np.allclose(arch.interpret(term, "default", "ext").values, expected, atol=1e-12)
    rep = arch.representation(term)
    assert np.allclose(arch.semantics(rep, "default", "ext").values, expected, atol=1e-12)


def test_printed_coordinate_audit() -> None:
    profile, verdict = audit_printed_coordinates(seed=0)
    assert profile.eps_pres == pytest.approx(0.2313, abs=5e-3)
    assert profile.eps_faith == pytest.approx(0.5897, abs=5e-3)
    assert profile.delta_comp == pytest.approx(0.2191, abs=5e-3)
    assert profile.beta == 0.5
    assert profile.ace == 0.0
    assert profile.ace_continuous == pytest.approx(0.1887, abs=1e-3)
    errors = {r.item: r.distance for r in profile.tables.systematicity}
    assert errors["RED WEST"] == pytest.approx(0.682, abs=5e-3)
    assert errors["BLUE EAST"] == pytest.approx(0.442, abs=5e-3)
    assert profile.omega_at(0.5) == 0.0
    assert profile.g0_level == "strong"
    assert set(profile.curves) == {"RED", "NORTH"}
    assert verdict.cell_g2a_g4 == "miscalibrated"
    assert verdict.cell_g2a_g2b == "effortful failure"


def test_printed_coordinate_audit_is_seed_independent() -> None:
    a, _ = audit_printed_coordinates(seed=0)
    b, _ = audit_printed_coordinates(seed=9)
    assert a.model_dump() == b.model_dump()


def test_untrained_agent_audit_runs(small_agent, world) -> None:
    arch = build_architecture(small_agent, world)
    profile, verdict = audit_gridworld(
        arch, world, ["RED", "NORTH"], ["RED NORTH"], ["BLUE EAST", "RED WEST"],
        scales=[0.0, 0.5], samples_per_scale=20,
    )
    values = [v for _, v in profile.omega_curve]
    assert values[0] == 0.0 and values[1] >= 0.0
    assert profile.beta in (0.0, 0.5, 1.0)
    assert profile.curves["RED"].samples_per_scale == 20
    assert verdict.archetype in {
        "parrot", "calculator", "glass canon", "brittle expert", "drifter", "grounded", "unclassified",
    }


@pytest.mark.slow
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_trained_agent_end_to_end(world, seed) -> None:
    config = TrainConfig(episodes=5000, log_every=500, seed=seed)
    agent, log = train(world, AgentSpec(seed=seed), config)
    assert min(r.loss for r in log.rows) < 0.05
    arch = build_architecture(agent, world, config)
    grammar = grid_grammar(world)
    ablated = arch.interpret_under(command_term(grammar, "RED NORTH"), "default", "ext", [MODIFIER_INTEGRATION])
    assert ablated == arch.interpret(grammar.leaf("RED"), "default", "ext")

    profile, _ = audit_trained_agent(agent, world, config, seed=seed)
    assert profile.beta in (0.0, 0.5, 1.0)
    assert len(training_commands(world, config)) == 12

    # robustness dampening: median drift at scale 0.5 stays below 0.5 for every atom
    for label, curve in profile.curves.items():
        index = curve.scales.index(0.5)
        assert float(np.median(curve.drifts[index])) < 0.5, label
