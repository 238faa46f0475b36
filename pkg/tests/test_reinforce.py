import numpy as np
import pytest

from models.grid_agent import GridAgent
from models.reinforce import (
    clip_by_global_norm,
    distance_loss,
    gradient_check,
    surrogate_loss,
    train,
    training_commands,
)
from schemas.gridworld import AgentSpec, TrainConfig, WorldSpec
from semantics.errors import DivergedTraining


def test_training_commands_exclude_heldout(world) -> None:
    commands = training_commands(world, TrainConfig())
    assert len(commands) == 12
    assert ("BLUE", "EAST") not in commands
    assert ("RED", "WEST") not in commands
    assert ("RED",) in commands
    assert len(training_commands(world, TrainConfig(train_atoms=False))) == 6


def test_zero_episodes_returns_initial_weights(world) -> None:
    spec = AgentSpec(embed_dim=4, hidden_dim=8, seed=3)
    agent, log = train(world, spec, TrainConfig(episodes=0))
    initial = GridAgent.initialize(world.vocab, spec)
    for name, arr in initial.params.items():
        assert np.array_equal(agent.params[name], arr)
    assert log.rows == []


def test_short_run_is_deterministic(world) -> None:
    spec = AgentSpec(embed_dim=4, hidden_dim=8, seed=1)
    config = TrainConfig(episodes=30, log_every=10, seed=5)
    a, log_a = train(world, spec, config)
    b, log_b = train(world, spec, config)
    assert [r.episode for r in log_a.rows] == [0, 10, 20, 30]
    assert [r.loss for r in log_a.rows] == [r.loss for r in log_b.rows]
    assert all(np.array_equal(a.params[k], b.params[k]) for k in a.params)


def test_training_reduces_loss(world) -> None:
    spec = AgentSpec(embed_dim=8, hidden_dim=16, seed=0)
    _, log = train(world, spec, TrainConfig(episodes=300, log_every=100, learning_rate=1e-2))
    assert log.final_loss < log.rows[0].loss


def test_divergence_is_reported(world) -> None:
    with pytest.raises(DivergedTraining) as info:
        train(world, AgentSpec(embed_dim=2, hidden_dim=3), TrainConfig(episodes=5, divergence_loss=1e-6))
    assert info.value.episode == 0


def test_distance_loss_gradient() -> None:
    y = np.array([[1.0, 1.0], [0.0, 0.0]])
    gold = np.array([[4.0, 5.0], [0.0, 0.0]])
    loss, grad = distance_loss(y, gold)
    assert loss == pytest.approx(2.5)
    assert np.allclose(grad[0], np.array([-0.6, -0.8]) / 2)
    assert np.array_equal(grad[1], np.zeros(2))


def test_surrogate_gradient_matches_finite_differences() -> None:
    rng = np.random.default_rng(0)
    y = rng.normal(size=(3, 2))
    actions = y[:, None, :] + 0.3 * rng.normal(size=(3, 4, 2))
    advantages = rng.normal(size=(3, 4))
    _, grad = surrogate_loss(y, actions, advantages, 0.3)
    step = 1e-6
    for i in range(3):
        for j in range(2):
            plus, minus = y.copy(), y.copy()
            plus[i, j] += step
            minus[i, j] -= step
            numeric = (surrogate_loss(plus, actions, advantages, 0.3)[0] - surrogate_loss(minus, actions, advantages, 0.3)[0]) / (2 * step)
            assert grad[i, j] == pytest.approx(numeric, rel=1e-5, abs=1e-8)


def test_clip_by_global_norm() -> None:
    grads = {"a": np.array([3.0]), "b": np.array([4.0])}
    assert clip_by_global_norm(grads, 1.0) == pytest.approx(5.0)
    assert np.sqrt(grads["a"] ** 2 + grads["b"] ** 2)[0] == pytest.approx(1.0)


def test_gradient_check_small_agent(small_agent, world) -> None:
    reports = gradient_check(small_agent, world, seed=0)
    assert [r.loss for r in reports] == ["distance", "surrogate"]
    for report in reports:
        assert {g.group for g in report.groups} == {"embedding", "recurrent", "decoder"}
        assert report.max_relative_error <= 1e-4


def test_gradient_check_full_size_agent(agent) -> None:
    world = WorldSpec()
    reports = gradient_check(agent, world, seed=1)
    assert max(r.max_relative_error for r in reports) <= 1e-4
